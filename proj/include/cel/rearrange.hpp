/// @file rearrange.hpp
/// @brief Distribution functions, decreasing rearrangements, Lorentz norms.
#pragma once

#include <string>
#include <vector>

#include "cel/fields.hpp"

namespace cel {

/// f* as a step function: values[k] on [k*w, (k+1)*w), zero beyond.
struct RearrangementProfile {
    std::vector<double> values;  ///< |samples| sorted descending
    double weight = 0.0;         ///< measure per sample (dx^2)

    double total_measure() const { return weight * static_cast<double>(values.size()); }
    /// f*(t), right-continuous.
    double at(double t) const;
    /// (int_0^inf f*^p)^(1/p); p = inf gives f*(0).
    double lp_norm(double p) const;
};

double distribution_function(const ScalarField& f, double alpha);
RearrangementProfile decreasing_rearrangement(const ScalarField& f);

/// q = +inf selects sup_t t^(1/p) f*(t).
double lorentz_norm(const RearrangementProfile& prof, double p, double q);
double lorentz_norm(const ScalarField& f, double p, double q);

/// int_0^delta f*(s) ds.
double small_set_concentration(const RearrangementProfile& prof, double delta);
double small_set_concentration(const ScalarField& f, double delta);

/// `t,fstar` table, one row per step start.
void write_profile_csv(const std::string& path, const RearrangementProfile& prof);

}  // namespace cel

#pragma once

#include <stdexcept>
#include <string>

namespace dfhn {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_input : error {
    using error::error;
};

struct invalid_config : error {
    using error::error;
};

// Integration aborted: |x| or |y| exceeded the blow-up bound.
struct blowup_error : error {
    double t;
    explicit blowup_error(double t_blow)
        : error("blow-up at t = " + std::to_string(t_blow)), t(t_blow) {}
};

struct out_of_range_error : error {
    using error::error;
};

struct domain_error : error {
    using error::error;
};

struct degenerate_parameters : error {
    using error::error;
};

struct branch_domain_error : error {
    using error::error;
};

struct contour_on_root : error {
    using error::error;
};

struct no_convergence : error {
    using error::error;
};

struct not_on_hopf_curve : error {
    using error::error;
};

struct ill_conditioned : error {
    using error::error;
};

struct non_convergent : error {
    using error::error;
};

struct no_cycle_at_start : error {
    using error::error;
};

struct not_bistable : error {
    using error::error;
};

struct empty_section : error {
    using error::error;
};

} // namespace dfhn

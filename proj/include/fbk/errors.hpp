#pragma once

#include <stdexcept>
#include <string>

namespace fbk {

// Every failure mode the library can signal. The CLI maps these to process
// exit codes: validation -> 2, numeric -> 3, usage -> 4.
enum class errc {
    parse_error,
    not_homogeneous,
    division_by_zero_poly,
    factorization_mismatch,
    component_divides_f1,
    non_equivariant,
    base_action_trivial,
    central_fiber_requested,
    curve_degenerate,
    resolution_too_low,
    degree_mismatch,
    grid_component_mismatch,
    tracking_failed,
    bad_base_point,
    order_mismatch,
    not_positive_definite,
    point_off_fiber,
    bound_exceeded,
    grid_spec_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::parse_error: return "ParseError";
        case errc::not_homogeneous: return "NotHomogeneous";
        case errc::division_by_zero_poly: return "DivisionByZeroPoly";
        case errc::factorization_mismatch: return "FactorizationMismatch";
        case errc::component_divides_f1: return "ComponentDividesF1";
        case errc::non_equivariant: return "NonEquivariant";
        case errc::base_action_trivial: return "BaseActionTrivial";
        case errc::central_fiber_requested: return "CentralFiberRequested";
        case errc::curve_degenerate: return "CurveDegenerate";
        case errc::resolution_too_low: return "ResolutionTooLow";
        case errc::degree_mismatch: return "DegreeMismatch";
        case errc::grid_component_mismatch: return "GridComponentMismatch";
        case errc::tracking_failed: return "TrackingFailed";
        case errc::bad_base_point: return "BadBasePoint";
        case errc::order_mismatch: return "OrderMismatch";
        case errc::not_positive_definite: return "NotPositiveDefinite";
        case errc::point_off_fiber: return "PointOffFiber";
        case errc::bound_exceeded: return "BoundExceeded";
        case errc::grid_spec_error: return "GridSpecError";
    }
    return "UnknownError";
}

inline int errc_exit_code(errc c) {
    switch (c) {
        case errc::not_positive_definite:
        case errc::tracking_failed:
        case errc::curve_degenerate:
            return 3;
        case errc::grid_spec_error:
            return 4;
        default:
            return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) raise(code, msg);
}

}  // namespace fbk

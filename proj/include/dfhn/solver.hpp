#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dfhn/core.hpp"

namespace dfhn {

/// Initial history on [-tau, 0]: either a constant state or a sampled function.
struct SampledHistory {
    std::function<State(double)> value;            // t in [-tau, 0]
    std::function<State(double)> derivative = {};  // optional; finite differences otherwise
};
using HistoryInit = std::variant<State, SampledHistory>;

struct SolverConfig {
    double h_max = 0.0;      // <= 0: default min(tau/20, 1e-2)
    double T = 100.0;        // total integration time
    double T_discard = -1.0; // < 0: default max(50/eps, 10 tau), or 20 tau for the fast subsystem
    HistoryInit history = State{};

    void validate() const {
        if (!(T > 0.0) || !std::isfinite(T)) throw invalid_config("T must be positive");
        if (T_discard >= T) throw invalid_config("T_discard must be < T");
    }
};

constexpr double kBlowupBound = 1e6;

/// Mesh-sampled solution with nodal derivatives; spacing h = tau/m divides the
/// delay exactly, so delayed node lookups never interpolate. Dense evaluation
/// is cubic Hermite per segment (C^1, exact at nodes, O(h^4) between).
class Trajectory {
  public:
    Trajectory(double tau, int m, bool fast, double frozen_y, double t_discard);

    double tau() const { return tau_; }
    double h() const { return h_; }
    int m() const { return m_; }
    bool fast() const { return fast_; }
    double t_begin() const { return -tau_; }
    double t_end() const { return node_time(size() - 1); }
    double t_discard() const { return t_discard_; }
    std::size_t size() const { return x_.size(); }
    double node_time(std::size_t i) const { return (static_cast<double>(i) - m_) * h_; }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& dx() const { return dx_; }
    const std::vector<double>& dy() const { return dy_; }

    State dense_eval(double t) const;        // throws out_of_range_error outside [-tau, T]
    double dense_x(double t) const;
    double x_delayed(double t) const;        // dense x at t - tau; t >= 0

    void write_csv(const std::string& path) const; // header t,x,y,x_delayed, 17 sig digits

    // construction hooks used by the integrator and by test fixtures
    void push_node(double x, double y, double dx, double dy);
    void set_node(std::size_t i, double x, double y, double dx, double dy);
    void reserve_total(std::size_t n);

  private:
    std::size_t segment_of(double t) const;
    double tau_;
    double h_;
    int m_;
    bool fast_;
    double frozen_y_;
    double t_discard_;
    std::vector<double> x_, y_, dx_, dy_;
};

Trajectory integrate(const SystemParams& p, const SolverConfig& cfg);
Trajectory integrate_fast(const FastParams& fp, const SolverConfig& cfg);

enum class EventCoordinate { x, y, x_delayed };
enum class EventDirection { up, down, both };

struct EventSpec {
    EventCoordinate coordinate = EventCoordinate::y;
    double level = 0.0;
    EventDirection direction = EventDirection::up;

    void validate() const {
        if (!std::isfinite(level)) throw invalid_config("event level must be finite");
    }
};

struct Crossing {
    double t;
    State state;
    double x_delayed;
};

/// Crossing times located on the Hermite interpolant to 1e-10 relative
/// tolerance; only crossings after the trajectory's discard time are reported.
std::vector<Crossing> detect_crossings(const Trajectory& tr, const EventSpec& ev);

} // namespace dfhn

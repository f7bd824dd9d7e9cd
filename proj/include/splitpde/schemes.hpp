#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splitpde/corrector.hpp"
#include "splitpde/flows.hpp"

namespace splitpde {

enum class Scheme { Strang, StrangM3, StrangM5a, StrangM5b, RK4Ref };

const char* scheme_token(Scheme s);  // "strang", "m3", "m5a", "m5b", "rk4ref"
std::optional<Scheme> scheme_from_token(const std::string& token);

/// Whether adjacent reaction half-steps of consecutive steps may be merged
/// into full steps (Strang with reaction outermost, and M5b whose corrector
/// needs only the half-flow output and the prescribed data).
bool scheme_supports_fusion(Scheme s, int strang_ordering);

struct SchemeConfig {
    Scheme scheme = Scheme::Strang;
    double tau = 0.01;
    double T = 0.1;
    bool fused = true;        // only valid where scheme_supports_fusion holds
    int strang_ordering = 3;  // 3: reaction outermost (benchmarked), 2: diffusion outermost
    int reaction_substeps = 5;
    MatFunBackend backend;
    CorrectorRule corrector;

    /// N = T/tau; throws ConfigError unless it is a positive integer.
    int steps() const;
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;        // n tau, n = 0..N
    std::vector<StateField> states;   // length N+1
    FlowCounters counters;
    std::vector<double> corrector_norms;            // ||q_n||_inf per step
    std::vector<double> corrector_trace_residuals;  // relative, per step

    const StateField& final_state() const { return states.back(); }
};

/// Splitting time integrator bound to one discrete problem.  Holds the
/// matrix-function engine and (when needed) the harmonic extender so their
/// per-operator setup is paid once per run.
class Integrator {
public:
    Integrator(const DiscreteDiffusion& d, const ReactionTerm& f, SchemeConfig cfg);

    /// Runs N = T/tau steps from u0 at t = 0 (boundary values of u0 are
    /// reconstructed first).  Counter totals are asserted against the
    /// per-scheme cost laws before returning.
    Trajectory integrate(const StateField& u0);

    // Single unfused steps, exposed for direct testing.
    StateField step_strang(const StateField& u, double t_n, FlowCounters& ctr);
    StateField step_m3(const StateField& u, double t_n, FlowCounters& ctr,
                       Corrector* q_out = nullptr);
    StateField step_m5(const StateField& u, double t_n, FlowCounters& ctr,
                       Corrector* q_out = nullptr);

    Corrector build_corrector(const StateField& u_n, const StateField* w, double t_n);

    const MatFunEngine& engine() const { return engine_; }
    const SchemeConfig& config() const { return cfg_; }

private:
    const DiscreteDiffusion& d_;
    const ReactionTerm& f_;
    SchemeConfig cfg_;
    MatFunEngine engine_;
    std::optional<HarmonicExtender> extender_;

    void record(Trajectory& traj, const Corrector& q) const;
    void check_counters(const Trajectory& traj, int n_steps) const;
};

/// Method-of-lines reference: classical RK4 on u' = A u + c(t) + f(u) with
/// step tau_ref, storing states at multiples of checkpoint_dt only.
/// tau_ref must divide checkpoint_dt, checkpoint_dt must divide T.
Trajectory rk4_reference(const DiscreteDiffusion& d, const ReactionTerm& f,
                         const StateField& u0, double tau_ref, double T,
                         double checkpoint_dt);

}  // namespace splitpde

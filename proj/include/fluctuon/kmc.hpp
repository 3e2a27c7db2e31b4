#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluctuon/boundary.hpp"
#include "fluctuon/kernel.hpp"
#include "fluctuon/params.hpp"
#include "fluctuon/regime.hpp"

namespace fluctuon {

class Fenwick {
public:
    explicit Fenwick(int n = 0) : tree_(n + 1, 0.0) {}
    void build(const std::vector<double>& w);  // w[0..n-1]
    void add(int i, double d);
    double prefix(int i) const;  // sum of w[0..i-1]
    double total() const { return prefix(size()); }
    // smallest i with prefix(i+1) > target
    int find(double target) const;
    int size() const { return static_cast<int>(tree_.size()) - 1; }

private:
    std::vector<double> tree_;
};

class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);
    // index in [0, n) from two uniforms
    int sample(double u1, double u2) const;
    int size() const { return static_cast<int>(prob_.size()); }

private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

// Exact sampler of |z| under 2p(|z|), z != 0.
class JumpLengthSampler {
public:
    explicit JumpLengthSampler(const JumpKernel& kernel);
    template <class U>
    long sample(U&& uniform) const;
    double table_mass() const { return table_mass_; }

private:
    long tail_draw(const std::function<double()>& uniform) const;
    AliasTable alias_;
    double table_mass_;
    double gamma_;
    long z_max_;
};

// Immutable data shared by every replica of one model.
struct SimContext {
    ModelParams params;
    std::shared_ptr<const JumpKernel> kernel;
    RegimeSpec regime;
    BoundaryRateTables tables;
    double theta_N;                  // Theta(N)
    double reservoir_scale;          // Theta(N) kappa N^-theta
    std::vector<double> flip_left;   // proposal rates, indexed by site
    std::vector<double> flip_right;
    JumpLengthSampler jumps;
    double rate_cap = 1e13;

    static std::shared_ptr<const SimContext> make(const ModelParams& params, std::shared_ptr<const JumpKernel> kernel);

private:
    SimContext(const ModelParams& p, std::shared_ptr<const JumpKernel> k);
};

enum class EventKind : uint8_t { Exchange, FlipLeft, FlipRight };

struct Event {
    double t;
    EventKind kind;
    int x;
    int y;  // Exchange: particle moved x -> y; flips: -1
};

struct Snapshot {
    double t;
    std::vector<uint8_t> eta;
};

struct EventLog {
    std::vector<Event> events;
    std::vector<Snapshot> snapshots;
    std::string events_csv() const;
    std::string snapshots_csv() const;
};

class Lattice;

class Observer {
public:
    virtual ~Observer() = default;
    // configuration held constant for dt
    virtual void hold(double dt, const Lattice& s) { (void)dt, (void)s; }
    // called after an executed event
    virtual void event(const Event& e, const Lattice& s) { (void)e, (void)s; }
    virtual void snapshot(double t, const Lattice& s) { (void)t, (void)s; }
};

struct StepResult {
    double dt;
    bool executed;
    Event event;
};

class RateOverflow : public std::runtime_error {
public:
    RateOverflow(double total);
    double total;
};

class Lattice {
public:
    Lattice(std::shared_ptr<const SimContext> ctx, std::vector<uint8_t> eta, uint64_t seed);

    static Lattice product(std::shared_ptr<const SimContext> ctx, const std::function<double(double)>& g,
                           uint64_t seed);

    // samples the next proposal, applies it and advances the clock
    StepResult step();
    // samples the next proposal without touching the state
    StepResult propose();
    EventLog run(double t_end, const std::vector<double>& observe_at = {}, Observer* obs = nullptr,
                 bool record_events = true);
    // advance without bookkeeping of a log
    void advance(double t_end, const std::vector<double>& observe_at, Observer* obs);

    int N() const { return ctx_->params.N; }
    double clock() const { return clock_; }
    uint8_t operator[](int x) const { return eta_[x]; }
    const std::vector<uint8_t>& occupancy() const { return eta_; }
    int particle_count() const { return static_cast<int>(pos_.size()); }
    uint64_t events_executed() const { return executed_; }
    uint64_t proposals() const { return proposals_; }
    const SimContext& context() const { return *ctx_; }

    // relative gap between the flip rate index and a from-scratch sum, plus particle bookkeeping
    double audit() const;
    void set_clock(double t) { clock_ = t; }

    // the exact generator rate of executed transitions out of the current state (diagnostics)
    double exit_rate() const;

private:
    void apply(const Event& e);
    void rebuild_index();
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::shared_ptr<const SimContext> ctx_;
    std::vector<uint8_t> eta_;     // sites 0..N, 1..N-1 used
    std::vector<int> pos_;         // particle positions
    std::vector<int> slot_;        // slot_[x] = index in pos_ or -1
    Fenwick flips_;
    std::mt19937_64 rng_;
    double clock_ = 0;
    uint64_t executed_ = 0;
    uint64_t proposals_ = 0;
    uint64_t since_rebuild_ = 0;
};

struct DensityProfile {
    std::vector<double> raw;   // x = 1..N-1 at index x-1
    std::vector<double> bins;  // average occupancy per bin of [0,1]
};

DensityProfile empirical_density(const std::vector<uint8_t>& eta, int N, int nbins);

// replays a log from an initial configuration
std::vector<uint8_t> replay(std::vector<uint8_t> eta, const EventLog& log);

template <class U>
long JumpLengthSampler::sample(U&& uniform) const {
    double u = uniform();
    if (u < table_mass_) return 1 + alias_.sample(u / table_mass_, uniform());
    return tail_draw(std::function<double()>(uniform));
}

}  // namespace fluctuon

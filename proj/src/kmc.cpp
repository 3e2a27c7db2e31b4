#include "fluctuon/kmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluctuon/csv.hpp"

namespace fluctuon {

// ---- Fenwick ----

void Fenwick::build(const std::vector<double>& w) {
    tree_.assign(w.size() + 1, 0.0);
    for (size_t i = 0; i < w.size(); ++i) {
        tree_[i + 1] += w[i];
        size_t j = (i + 1) + ((i + 1) & -(i + 1));
        if (j < tree_.size()) tree_[j] += tree_[i + 1];
    }
}

void Fenwick::add(int i, double d) {
    for (int j = i + 1; j < static_cast<int>(tree_.size()); j += j & -j) tree_[j] += d;
}

double Fenwick::prefix(int i) const {
    double s = 0;
    for (int j = i; j > 0; j -= j & -j) s += tree_[j];
    return s;
}

int Fenwick::find(double target) const {
    int n = size(), pos = 0;
    int step = 1;
    while (step * 2 <= n) step *= 2;
    for (; step > 0; step /= 2) {
        if (pos + step <= n && tree_[pos + step] <= target) {
            pos += step;
            target -= tree_[pos];
        }
    }
    return std::min(pos, n - 1);
}

// ---- alias ----

AliasTable::AliasTable(const std::vector<double>& weights) {
    const int n = static_cast<int>(weights.size());
    if (n == 0) throw std::invalid_argument("alias table needs weights");
    double sum = 0;
    for (double w : weights) sum += w;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = weights[i] * n / sum;
    prob_.assign(n, 1.0);
    alias_.resize(n);
    for (int i = 0; i < n; ++i) alias_[i] = i;
    std::vector<int> small, large;
    for (int i = n - 1; i >= 0; --i) (q[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        int s = small.back(), l = large.back();
        small.pop_back();
        prob_[s] = q[s];
        alias_[s] = l;
        q[l] -= 1.0 - q[s];
        if (q[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
}

int AliasTable::sample(double u1, double u2) const {
    const int n = size();
    int i = std::min(static_cast<int>(u1 * n), n - 1);
    return u2 < prob_[i] ? i : alias_[i];
}

JumpLengthSampler::JumpLengthSampler(const JumpKernel& k) : gamma_(k.gamma), z_max_(k.z_max) {
    std::vector<double> w(k.z_max);
    double mass = 0;
    for (long z = 1; z <= k.z_max; ++z) {
        w[z - 1] = 2.0 * k.p_table[z];
        mass += w[z - 1];
    }
    alias_ = AliasTable(w);
    table_mass_ = 1.0 - 2.0 * k.tail_cdf[k.z_max + 1];
    (void)mass;
}

long JumpLengthSampler::tail_draw(const std::function<double()>& uniform) const {
    // proposal ceil(X), X Pareto on [z_max, inf); accept k^-s / int_{k-1}^k x^-s dx
    const double s = gamma_ + 1.0;
    for (;;) {
        double u = 1.0 - uniform();
        double x = static_cast<double>(z_max_) * std::pow(u, -1.0 / (s - 1.0));
        if (x > 1e15) x = 1e15;
        double k = std::ceil(x);
        if (k <= static_cast<double>(z_max_)) k = static_cast<double>(z_max_) + 1.0;
        double cell = (std::pow(k - 1.0, 1.0 - s) - std::pow(k, 1.0 - s)) / (s - 1.0);
        if (uniform() * cell <= std::pow(k, -s)) return static_cast<long>(k);
    }
}

// ---- context ----

SimContext::SimContext(const ModelParams& p, std::shared_ptr<const JumpKernel> k)
    : params(p), kernel(std::move(k)), regime(regime_of(params, *kernel)), tables(boundary_tables(*kernel, p.N)),
      theta_N(regime.time_scale(p.N)),
      reservoir_scale(theta_N * p.kappa * std::pow(static_cast<double>(p.N), -p.theta)), jumps(*kernel) {
    flip_left.assign(p.N + 1, 0.0);
    flip_right.assign(p.N + 1, 0.0);
    for (int x = 1; x < p.N; ++x) {
        flip_left[x] = reservoir_scale * tables.r_minus[x];
        flip_right[x] = reservoir_scale * tables.r_plus[x];
    }
}

std::shared_ptr<const SimContext> SimContext::make(const ModelParams& params, std::shared_ptr<const JumpKernel> k) {
    params.validate();
    if (!k) throw std::invalid_argument("SimContext: kernel missing");
    return std::shared_ptr<const SimContext>(new SimContext(params, std::move(k)));
}

RateOverflow::RateOverflow(double t)
    : std::runtime_error([t] {
          std::ostringstream os;
          os << "total event rate " << t << " exceeds what the clock can resolve";
          return os.str();
      }()),
      total(t) {}

// ---- lattice ----

Lattice::Lattice(std::shared_ptr<const SimContext> ctx, std::vector<uint8_t> eta, uint64_t seed)
    : ctx_(std::move(ctx)), eta_(std::move(eta)), rng_(seed) {
    const int N = ctx_->params.N;
    if (static_cast<int>(eta_.size()) == N - 1) eta_.insert(eta_.begin(), 0), eta_.push_back(0);
    if (static_cast<int>(eta_.size()) != N + 1)
        throw std::invalid_argument("Lattice: occupancy must have N-1 (or N+1 padded) entries");
    eta_[0] = eta_[N] = 0;
    slot_.assign(N + 1, -1);
    for (int x = 1; x < N; ++x) {
        if (eta_[x] > 1) throw std::invalid_argument("Lattice: occupancy must be 0 or 1");
        if (eta_[x]) {
            slot_[x] = static_cast<int>(pos_.size());
            pos_.push_back(x);
        }
    }
    rebuild_index();
}

Lattice Lattice::product(std::shared_ptr<const SimContext> ctx, const std::function<double(double)>& g,
                         uint64_t seed) {
    const int N = ctx->params.N;
    Lattice L(ctx, std::vector<uint8_t>(N + 1, 0), seed);
    for (int x = 1; x < N; ++x) {
        double q = g(static_cast<double>(x) / N);
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("initial profile leaves [0,1]");
        L.eta_[x] = L.uniform() < q ? 1 : 0;
    }
    L.pos_.clear();
    for (int x = 1; x < N; ++x) {
        L.slot_[x] = -1;
        if (L.eta_[x]) {
            L.slot_[x] = static_cast<int>(L.pos_.size());
            L.pos_.push_back(x);
        }
    }
    return L;
}

void Lattice::rebuild_index() {
    const int N = ctx_->params.N;
    std::vector<double> w(N - 1);
    for (int x = 1; x < N; ++x) w[x - 1] = ctx_->flip_left[x] + ctx_->flip_right[x];
    flips_.build(w);
    since_rebuild_ = 0;
}

double Lattice::audit() const {
    const int N = ctx_->params.N;
    double s = 0;
    for (int x = 1; x < N; ++x) s += ctx_->flip_left[x] + ctx_->flip_right[x];
    double gap = s > 0 ? std::abs(flips_.total() - s) / s : std::abs(flips_.total());
    int count = 0;
    for (int x = 1; x < N; ++x) {
        count += eta_[x];
        bool listed = slot_[x] >= 0 && slot_[x] < static_cast<int>(pos_.size()) && pos_[slot_[x]] == x;
        if (listed != (eta_[x] == 1)) return 1.0;
    }
    if (count != particle_count()) return 1.0;
    return gap;
}

StepResult Lattice::propose() {
    const SimContext& c = *ctx_;
    const int N = c.params.N;
    const double bulk = c.theta_N * static_cast<double>(pos_.size());
    const double flip = flips_.total();
    const double R = bulk + flip;
    if (!std::isfinite(R) || R > c.rate_cap) throw RateOverflow(R);
    StepResult r{0.0, false, {0.0, EventKind::Exchange, 0, -1}};
    if (!(R > 0)) {
        r.dt = INFINITY;
        return r;
    }
    ++proposals_;
    double e = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    r.dt = -std::log(e) / R;
    double v = uniform() * R;
    if (v < bulk) {
        int idx = std::min(static_cast<int>(v / c.theta_N), static_cast<int>(pos_.size()) - 1);
        int x = pos_[idx];
        long z = c.jumps.sample([this] { return uniform(); });
        if (uniform() < 0.5) z = -z;
        long y = x + z;
        if (y >= 1 && y <= N - 1 && !eta_[y]) {
            r.executed = true;
            r.event = {0.0, EventKind::Exchange, x, static_cast<int>(y)};
        }
        return r;
    }
    double target = v - bulk;
    int i = flips_.find(target);
    int x = i + 1;
    double w = target - flips_.prefix(i);
    bool left = w < c.flip_left[x];
    double delta = left ? c.params.alpha : c.params.beta;
    double accept = eta_[x] ? 1.0 - delta : delta;
    if (uniform() < accept) {
        r.executed = true;
        r.event = {0.0, left ? EventKind::FlipLeft : EventKind::FlipRight, x, -1};
    }
    return r;
}

void Lattice::apply(const Event& e) {
    if (e.kind == EventKind::Exchange) {
        int s = slot_[e.x];
        pos_[s] = e.y;
        slot_[e.y] = s;
        slot_[e.x] = -1;
        eta_[e.x] = 0;
        eta_[e.y] = 1;
    } else if (eta_[e.x]) {
        int s = slot_[e.x];
        int last = pos_.back();
        pos_[s] = last;
        slot_[last] = s;
        pos_.pop_back();
        slot_[e.x] = -1;
        eta_[e.x] = 0;
    } else {
        slot_[e.x] = static_cast<int>(pos_.size());
        pos_.push_back(e.x);
        eta_[e.x] = 1;
    }
    ++executed_;
}

StepResult Lattice::step() {
    StepResult r = propose();
    if (!std::isfinite(r.dt)) return r;
    clock_ += r.dt;
    if (r.executed) {
        r.event.t = clock_;
        apply(r.event);
    }
    if (++since_rebuild_ >= 1000000) rebuild_index();
    return r;
}

namespace {

struct Recorder : Observer {
    EventLog* log;
    Observer* next;
    bool record;
    void hold(double dt, const Lattice& s) override {
        if (next) next->hold(dt, s);
    }
    void event(const Event& e, const Lattice& s) override {
        if (record) log->events.push_back(e);
        if (next) next->event(e, s);
    }
    void snapshot(double t, const Lattice& s) override {
        if (record) log->snapshots.push_back({t, s.occupancy()});
        if (next) next->snapshot(t, s);
    }
};

}  // namespace

EventLog Lattice::run(double t_end, const std::vector<double>& observe_at, Observer* obs, bool record_events) {
    EventLog log;
    Recorder rec;
    rec.log = &log;
    rec.next = obs;
    rec.record = record_events;
    advance(t_end, observe_at, &rec);
    return log;
}

void Lattice::advance(double t_end, const std::vector<double>& observe_at, Observer* obs) {
    if (!std::is_sorted(observe_at.begin(), observe_at.end()))
        throw std::invalid_argument("observation times must be sorted");
    size_t oi = 0;
    while (oi < observe_at.size() && observe_at[oi] < clock_) ++oi;
    double last = clock_;
    if (t_end <= clock_) {
        while (oi < observe_at.size() && observe_at[oi] <= t_end) {
            if (obs) obs->snapshot(observe_at[oi], *this);
            ++oi;
        }
        return;
    }
    for (;;) {
        StepResult r = propose();
        double tn = clock_ + r.dt;
        while (oi < observe_at.size() && observe_at[oi] < tn && observe_at[oi] <= t_end) {
            if (obs) {
                obs->hold(observe_at[oi] - last, *this);
                obs->snapshot(observe_at[oi], *this);
            }
            last = observe_at[oi];
            ++oi;
        }
        if (tn > t_end) {
            if (obs) obs->hold(t_end - last, *this);
            clock_ = t_end;
            break;
        }
        clock_ = tn;
        if (r.executed) {
            if (obs) obs->hold(tn - last, *this);
            last = tn;
            r.event.t = tn;
            apply(r.event);
            if (obs) obs->event(r.event, *this);
        }
        if (++since_rebuild_ >= 1000000) rebuild_index();
    }
}

double Lattice::exit_rate() const {
    const SimContext& c = *ctx_;
    const int N = c.params.N;
    double s = 0;
    for (int x = 1; x < N; ++x) {
        for (int y = x + 1; y < N; ++y)
            if (eta_[x] != eta_[y]) s += c.theta_N * c.kernel->p(y - x);
        double ca = eta_[x] ? 1.0 - c.params.alpha : c.params.alpha;
        double cb = eta_[x] ? 1.0 - c.params.beta : c.params.beta;
        s += c.flip_left[x] * ca + c.flip_right[x] * cb;
    }
    return s;
}

DensityProfile empirical_density(const std::vector<uint8_t>& eta, int N, int nbins) {
    if (nbins < 1) throw std::invalid_argument("empirical_density: need at least one bin");
    if (static_cast<int>(eta.size()) != N + 1) throw std::invalid_argument("empirical_density: size mismatch");
    DensityProfile d;
    d.raw.resize(N - 1);
    std::vector<double> sum(nbins, 0.0), cnt(nbins, 0.0);
    for (int x = 1; x < N; ++x) {
        d.raw[x - 1] = eta[x];
        int b = static_cast<int>(static_cast<long>(x) * nbins / N);
        sum[b] += eta[x];
        cnt[b] += 1;
    }
    d.bins.resize(nbins);
    for (int b = 0; b < nbins; ++b) d.bins[b] = cnt[b] > 0 ? sum[b] / cnt[b] : NAN;
    return d;
}

std::vector<uint8_t> replay(std::vector<uint8_t> eta, const EventLog& log) {
    for (const Event& e : log.events) {
        if (e.kind == EventKind::Exchange) {
            if (eta[e.x] != 1 || eta[e.y] != 0) throw std::runtime_error("replay: exchange does not match state");
            eta[e.x] = 0;
            eta[e.y] = 1;
        } else {
            eta[e.x] ^= 1;
        }
    }
    return eta;
}

std::string EventLog::events_csv() const {
    CsvWriter w("t,kind,x,y");
    for (const Event& e : events) {
        const char* k = e.kind == EventKind::Exchange ? "exchange" : e.kind == EventKind::FlipLeft ? "flip_left" : "flip_right";
        w.row(e.t, k, e.x, e.kind == EventKind::Exchange ? std::to_string(e.y) : std::string());
    }
    return w.str();
}

std::string EventLog::snapshots_csv() const {
    CsvWriter w("t,x,eta");
    for (const Snapshot& s : snapshots)
        for (size_t x = 1; x + 1 < s.eta.size(); ++x) w.row(s.t, static_cast<int>(x), static_cast<int>(s.eta[x]));
    return w.str();
}

}  // namespace fluctuon

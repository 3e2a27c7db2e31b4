#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fluctuon/boundary.hpp"
#include "fluctuon/kernel.hpp"
#include "fluctuon/params.hpp"
#include "fluctuon/regime.hpp"

namespace fluctuon {

enum class Extension { ZeroOutside, EvenReflection, None };

class TestFunction {
public:
    // deriv(u, k) returns the k-th derivative at u in [0,1]
    using Deriv = std::function<double(double, int)>;

    TestFunction() = default;
    TestFunction(std::string name, Deriv d, int max_order, Space space, Extension ext,
                 std::vector<double> breaks = {});

    double operator()(double u) const { return d_(u, 0); }
    double deriv(double u, int k) const;
    int max_order() const { return max_order_; }
    Space space() const { return space_; }
    Extension extension() const { return ext_; }
    const std::string& name() const { return name_; }
    // points where some derivative up to max_order jumps
    const std::vector<double>& breaks() const { return breaks_; }

    // value of the extension to R at any real u
    double extended(double u) const;

    TestFunction with_extension(Extension e) const;
    TestFunction with_space(Space s) const;

    friend TestFunction operator*(const TestFunction& a, const TestFunction& b);
    friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
    friend TestFunction operator*(double s, const TestFunction& a);

private:
    std::string name_;
    Deriv d_;
    int max_order_ = 0;
    Space space_ = Space::Plumbing;
    Extension ext_ = Extension::None;
    std::vector<double> breaks_;
};

// the bump a(u) = c exp(-1/(u(1-u))) with unit mass, and phi(v) = 1 - int_0^v a
class Bump {
public:
    static const Bump& instance();
    double c() const { return c_; }
    double a(double u, int k) const;
    // int_0^v a, v clamped to [0,1]
    double integral(double v) const;
    double phi(double v, int k) const;

private:
    Bump();
    double c_;
    std::vector<double> cumulative_;  // at panel ends
    int panels_;
};

enum class Special { BumpA, Phi, PsiAB, Tanaka, CutoffPhi, Iota0, Iota1 };

TestFunction make_special(Special kind, double p1 = 0.0, double p2 = 0.0);

// robin_k = 2 m kappa / sigma^2 (only read for S_Rob)
TestFunction make_basis(Space space, int n, double robin_k = 0.0);

// n-th Robin frequency (n >= 1) and phase; H = cos(omega u + phase)
struct RobinMode {
    double omega;
    double phase;
};
RobinMode robin_mode(int n, double robin_k);

TestFunction sine_mode(int n);
TestFunction constant_function(double c);
TestFunction from_callable(std::string name, std::function<double(double)> f);

struct SpaceCondition {
    int order;
    int endpoint;  // 0 or 1
    double residual;
    bool pass;
};

struct SpaceReport {
    Space space;
    std::vector<SpaceCondition> conditions;
    bool pass = true;
};

SpaceReport space_check(const TestFunction& H, Space space, int k, double tol, double robin_k = 0.0);

enum class InnerKind { L2, H1, L2_V1 };

// profiles required for L2_V1
double inner(const TestFunction& H, const TestFunction& G, InnerKind kind,
             const ContinuumProfiles* profiles = nullptr);

double norm_theta(const TestFunction& H, const ModelParams& params, const JumpKernel& kernel);

// CSV u,H,H1,H2 on an equispaced grid of `points` nodes
std::string function_table_csv(const TestFunction& H, int points);

}  // namespace fluctuon

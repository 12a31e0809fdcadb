#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ballrgg {

namespace link {
/// f(t) = 1{t >= tau}
struct Threshold { double tau; };
/// f(t) = 1 / (1 + exp(r t))
struct Logistic { double r; };
/// f(t) = min(alpha / t^2, 1), f(0) = 1
struct PowerLaw { double alpha; };
/// f(t) = p (Erdos-Renyi)
struct Constant { double p; };
/// f(t) = (1 - t) / 2 (random dot product graph)
struct Rdpg {};
}  // namespace link

/// Edge-probability link f : [-1, 1] -> [0, 1].
class LinkFunction {
public:
    using Variant = std::variant<link::Threshold, link::Logistic, link::PowerLaw, link::Constant, link::Rdpg>;

    LinkFunction(Variant v);  // NOLINT: implicit by design of the variant API
    LinkFunction(link::Threshold v) : LinkFunction(Variant{v}) {}
    LinkFunction(link::Logistic v) : LinkFunction(Variant{v}) {}
    LinkFunction(link::PowerLaw v) : LinkFunction(Variant{v}) {}
    LinkFunction(link::Constant v) : LinkFunction(Variant{v}) {}
    LinkFunction(link::Rdpg v) : LinkFunction(Variant{v}) {}

    /// Checked evaluation: DomainError for |t| > 1 + 1e-12.
    double operator()(double t) const;

    /// Unchecked evaluation used by the inner loops; t is clamped to [-1, 1].
    double eval_unchecked(double t) const noexcept;

    /// Points in (-1, 1) where f is discontinuous or not differentiable.
    std::vector<double> breakpoints() const;

    /// Short identifier: threshold, logistic, powerlaw, constant, rdpg.
    std::string name() const;

    const Variant& variant() const noexcept { return v_; }

    template <class T>
    const T* get_if() const noexcept { return std::get_if<T>(&v_); }

private:
    Variant v_;
};

/// Free-function form of LinkFunction::operator().
double link_eval(const LinkFunction& link, double t);

/// Ambient dimension d, measure parameter nu of F_nu, and link f.
struct ModelConfig {
    int d = 3;
    double nu = 0.5;
    LinkFunction link = link::Constant{0.5};

    /// gamma_nu = nu + (d - 1) / 2.
    double gamma_nu() const noexcept { return nu + 0.5 * (d - 1); }

    /// Throws DomainError unless d >= 2 and nu > -1/2.
    void validate() const;
    /// Same plus nu > 0 (needed by reproducing kernels and Gram estimation).
    void validate_positive_nu() const;
};

void to_json(nlohmann::json& j, const LinkFunction& link);
LinkFunction link_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ModelConfig& cfg);
ModelConfig model_from_json(const nlohmann::json& j);

}  // namespace ballrgg

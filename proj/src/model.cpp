#include "ballrgg/model.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ballrgg/errors.hpp"

namespace ballrgg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

LinkFunction::LinkFunction(Variant v) : v_(v) {
    std::visit(overloaded{
                   [](const link::Threshold& l) {
                       require(l.tau > 0.0 && l.tau < 1.0, "threshold link: tau must lie in (0, 1)");
                   },
                   [](const link::Logistic& l) { require(std::isfinite(l.r), "logistic link: r must be finite"); },
                   [](const link::PowerLaw& l) {
                       require(l.alpha > 0.0 && l.alpha < 1.0, "power-law link: alpha must lie in (0, 1)");
                   },
                   [](const link::Constant& l) {
                       require(l.p >= 0.0 && l.p <= 1.0, "constant link: p must lie in [0, 1]");
                   },
                   [](const link::Rdpg&) {},
               },
               v_);
}

double LinkFunction::eval_unchecked(double t) const noexcept {
    t = std::clamp(t, -1.0, 1.0);
    return std::visit(overloaded{
                          [t](const link::Threshold& l) { return t >= l.tau ? 1.0 : 0.0; },
                          [t](const link::Logistic& l) { return 1.0 / (1.0 + std::exp(l.r * t)); },
                          // t^2 <= alpha also covers t == 0.
                          [t](const link::PowerLaw& l) { return t * t <= l.alpha ? 1.0 : l.alpha / (t * t); },
                          [](const link::Constant& l) { return l.p; },
                          [t](const link::Rdpg&) { return 0.5 * (1.0 - t); },
                      },
                      v_);
}

double LinkFunction::operator()(double t) const {
    if (!(std::abs(t) <= 1.0 + 1e-12)) throw DomainError("link_eval: |t| must not exceed 1");
    return eval_unchecked(t);
}

std::vector<double> LinkFunction::breakpoints() const {
    return std::visit(overloaded{
                          [](const link::Threshold& l) { return std::vector<double>{l.tau}; },
                          [](const link::PowerLaw& l) {
                              const double s = std::sqrt(l.alpha);
                              return std::vector<double>{-s, s};
                          },
                          [](const auto&) { return std::vector<double>{}; },
                      },
                      v_);
}

std::string LinkFunction::name() const {
    return std::visit(overloaded{
                          [](const link::Threshold&) { return std::string("threshold"); },
                          [](const link::Logistic&) { return std::string("logistic"); },
                          [](const link::PowerLaw&) { return std::string("powerlaw"); },
                          [](const link::Constant&) { return std::string("constant"); },
                          [](const link::Rdpg&) { return std::string("rdpg"); },
                      },
                      v_);
}

double link_eval(const LinkFunction& link, double t) { return link(t); }

void ModelConfig::validate() const {
    require(d >= 2, "model: dimension d must be at least 2");
    require(nu > -0.5, "model: nu must exceed -1/2");
}

void ModelConfig::validate_positive_nu() const {
    validate();
    require(nu > 0.0, "model: this operation requires nu > 0");
}

void to_json(nlohmann::json& j, const LinkFunction& link) {
    j = std::visit(overloaded{
                       [](const link::Threshold& l) { return nlohmann::json{{"type", "threshold"}, {"tau", l.tau}}; },
                       [](const link::Logistic& l) { return nlohmann::json{{"type", "logistic"}, {"r", l.r}}; },
                       [](const link::PowerLaw& l) { return nlohmann::json{{"type", "powerlaw"}, {"alpha", l.alpha}}; },
                       [](const link::Constant& l) { return nlohmann::json{{"type", "constant"}, {"p", l.p}}; },
                       [](const link::Rdpg&) { return nlohmann::json{{"type", "rdpg"}}; },
                   },
                   link.variant());
}

LinkFunction link_from_json(const nlohmann::json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "threshold") return link::Threshold{j.at("tau").get<double>()};
        if (type == "logistic") return link::Logistic{j.at("r").get<double>()};
        if (type == "powerlaw") return link::PowerLaw{j.at("alpha").get<double>()};
        if (type == "constant") return link::Constant{j.at("p").get<double>()};
        if (type == "rdpg") return link::Rdpg{};
        throw ConfigError("link: unknown type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("link: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
    j = nlohmann::json{{"d", cfg.d}, {"nu", cfg.nu}, {"link", cfg.link}};
}

ModelConfig model_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    try {
        cfg.d = j.at("d").get<int>();
        cfg.nu = j.at("nu").get<double>();
        cfg.link = link_from_json(j.at("link"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

}  // namespace ballrgg

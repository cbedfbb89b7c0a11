#include "svput/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace svput {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

void SVModel::validate_params() const {
    if (!(rho >= -1.0 && rho <= 1.0)) throw parameter_error("model: rho must be in [-1, 1]");
    if (!(r >= 0.0)) throw parameter_error("model: r must be >= 0");
    if (!(K > 0.0)) throw parameter_error("model: K must be > 0");
    if (!(T > 0.0)) throw parameter_error("model: T must be > 0");
    if (!mu || !sigma || !b || !dmu || !dsigma || !db)
        throw parameter_error("model: all coefficient functions and derivatives must be set");
}

SVModel heston_model(double kappa, double m, double xi, double rho, double r, double K,
                     double T) {
    if (!(kappa > 0.0 && m > 0.0 && xi > 0.0))
        throw parameter_error("heston: kappa, m, xi must all be > 0");
    SVModel mdl;
    mdl.r = r;
    mdl.rho = rho;
    mdl.K = K;
    mdl.T = T;
    mdl.mu = [kappa, m](double y) { return kappa * (m - y); };
    mdl.dmu = [kappa](double) { return -kappa; };
    mdl.sigma = [](double y) { return std::sqrt(std::max(y, 0.0)); };
    mdl.dsigma = [](double y) { return 0.5 / std::sqrt(std::max(y, 1e-300)); };
    mdl.b = [xi](double y) { return xi * std::sqrt(std::max(y, 0.0)); };
    mdl.db = [xi](double y) { return 0.5 * xi / std::sqrt(std::max(y, 1e-300)); };
    mdl.label = "heston(kappa=" + fmt(kappa) + ",m=" + fmt(m) + ",xi=" + fmt(xi) + ")";
    mdl.validate_params();
    return mdl;
}

SVModel absorbed_model(double kappa, double xi, double rho, double r, double K, double T) {
    if (!(kappa >= 0.0 && xi > 0.0))
        throw parameter_error("absorbed: kappa must be >= 0 and xi > 0");
    SVModel mdl;
    mdl.r = r;
    mdl.rho = rho;
    mdl.K = K;
    mdl.T = T;
    mdl.mu = [kappa](double y) { return -kappa * y; };
    mdl.dmu = [kappa](double) { return -kappa; };
    mdl.sigma = [](double y) { return std::sqrt(std::max(y, 0.0)); };
    mdl.dsigma = [](double y) { return 0.5 / std::sqrt(std::max(y, 1e-300)); };
    mdl.b = [xi](double y) { return xi * std::sqrt(std::max(y, 0.0)); };
    mdl.db = [xi](double y) { return 0.5 * xi / std::sqrt(std::max(y, 1e-300)); };
    mdl.label = "absorbed(kappa=" + fmt(kappa) + ",xi=" + fmt(xi) + ")";
    mdl.validate_params();
    return mdl;
}

FicheraReport fichera_classify(const SVModel& model, int levels) {
    model.validate_params();
    FicheraReport rep;
    const double mu0 = model.mu(0.0);

    if (model.bb_prime_limit) {
        rep.limit_estimate = *model.bb_prime_limit;
    } else {
        if (levels < 3) throw parameter_error("fichera_classify: need at least 3 ladder levels");
        std::vector<std::pair<double, double>> samples;
        samples.reserve(static_cast<std::size_t>(levels));
        double y = 1e-4;
        for (int k = 0; k < levels; ++k, y *= 0.5)
            samples.emplace_back(y, model.b(y) * model.db(y));

        // One-step Richardson assuming an O(y) tail: R_k = 2 f(y/2) - f(y).
        std::vector<double> richardson(samples.size() - 1);
        for (std::size_t k = 0; k + 1 < samples.size(); ++k)
            richardson[k] = 2.0 * samples[k + 1].second - samples[k].second;

        const double last = richardson.back();
        const double prev = richardson[richardson.size() - 2];
        const double scale =
            std::max({std::abs(last), std::abs(samples.front().second), 1e-14});
        if (!std::isfinite(last) || std::abs(last - prev) > 1e-3 * scale)
            throw classification_uncertain_error(
                "fichera_classify: b(y) b'(y) has no stable limit at y->0 "
                "(last extrapolants " + fmt(prev) + " vs " + fmt(last) + ")",
                std::move(samples));

        rep.limit_estimate = last;
        rep.samples = std::move(samples);
    }

    rep.F_value = mu0 - rep.limit_estimate;
    rep.boundary_case =
        rep.F_value < 0.0 ? FicheraCase::F1_imposeBoundary : FicheraCase::F2_noBoundary;
    return rep;
}

bool AssumptionReport::all_passed() const {
    return std::all_of(clauses.begin(), clauses.end(),
                       [](const AssumptionClause& c) { return c.informational || c.passed; });
}

const AssumptionClause* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : clauses)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

AssumptionClause pointwise_clause(const std::string& name, std::span<const double> ys,
                                  const std::function<bool(double)>& ok,
                                  const std::string& fail_detail) {
    for (double y : ys)
        if (!ok(y))
            return {name, false, false, y, fail_detail + " violated at y=" + fmt(y)};
    return {name, true, false, ys.front(), ""};
}

AssumptionClause lipschitz_clause(const std::string& name, std::span<const double> ys,
                                  const std::function<double(double)>& f) {
    double worst = 0.0, worst_y = ys.front();
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
        const double dd = std::abs(f(ys[i + 1]) - f(ys[i])) / (ys[i + 1] - ys[i]);
        if (!(dd <= worst)) {
            worst = dd;
            worst_y = ys[i];
        }
    }
    const bool ok = std::isfinite(worst);
    return {name, ok, false, worst_y, "max divided difference " + fmt(worst)};
}

} // namespace

AssumptionReport validate_assumptions(const SVModel& model, std::span<const double> y_samples) {
    model.validate_params();
    if (y_samples.empty()) throw parameter_error("validate_assumptions: y_samples empty");
    for (std::size_t i = 0; i < y_samples.size(); ++i) {
        if (!(y_samples[i] > 0.0))
            throw parameter_error("validate_assumptions: y_samples must be positive");
        if (i > 0 && !(y_samples[i] > y_samples[i - 1]))
            throw parameter_error("validate_assumptions: y_samples must be sorted ascending");
    }

    AssumptionReport rep;
    const auto& ys = y_samples;

    rep.clauses.push_back(pointwise_clause(
        "sigma_positive", ys, [&](double y) { return model.sigma(y) > 0.0; }, "sigma(y)>0"));
    rep.clauses.push_back(pointwise_clause(
        "b_positive", ys, [&](double y) { return model.b(y) > 0.0; }, "b(y)>0"));
    rep.clauses.push_back(pointwise_clause(
        "sigma_prime_nonneg", ys, [&](double y) { return model.dsigma(y) >= 0.0; },
        "sigma'(y)>=0"));

    const double tol0 = 1e-12;
    const double s0 = model.sigma(0.0), b0 = model.b(0.0), mu0 = model.mu(0.0);
    rep.clauses.push_back({"sigma_zero_at_origin", std::abs(s0) <= tol0, false, 0.0,
                           "sigma(0)=" + fmt(s0)});
    rep.clauses.push_back(
        {"b_zero_at_origin", std::abs(b0) <= tol0, false, 0.0, "b(0)=" + fmt(b0)});

    // Relaxed origin-drift clause: mu(0) >= 0 instead of mu(0) = 0, so that
    // mean-reverting variance models with mu(0) = kappa m > 0 are admitted.
    rep.mu0_relaxed = mu0 > tol0;
    rep.clauses.push_back({"mu_nonneg_at_origin_relaxed", mu0 >= -tol0, false, 0.0,
                           "mu(0)=" + fmt(mu0) +
                               (rep.mu0_relaxed ? " (strict clause mu(0)=0 relaxed)" : "")});

    rep.clauses.push_back(lipschitz_clause("lipschitz_mu", ys, model.mu));
    rep.clauses.push_back(lipschitz_clause("lipschitz_sigma2", ys, [&](double y) {
        const double s = model.sigma(y);
        return s * s;
    }));
    rep.clauses.push_back(lipschitz_clause("lipschitz_b2", ys, [&](double y) {
        const double v = model.b(y);
        return v * v;
    }));

    // Linear growth of |mu| + b: the bound constant must not keep growing
    // along the sampled ray.
    {
        double c_full = 0.0, c_half = 0.0, arg_y = ys.front();
        const double y_mid = ys.back() * 0.5;
        for (double y : ys) {
            const double ratio = (std::abs(model.mu(y)) + model.b(y)) / (1.0 + y);
            if (ratio > c_full) {
                c_full = ratio;
                arg_y = y;
            }
            if (y <= y_mid) c_half = std::max(c_half, ratio);
        }
        const bool ok = std::isfinite(c_full) && (c_half <= 0.0 || c_full <= 1.5 * c_half);
        rep.clauses.push_back({"linear_growth_mu_plus_b", ok, false, arg_y,
                               "C=" + fmt(c_full) + " (first half C=" + fmt(c_half) + ")"});
    }

    // (sigma^2)' polynomial growth: sampling cannot falsify this sharply,
    // recorded against a generous degree-8 envelope.
    {
        double worst = 0.0, arg_y = ys.front();
        for (double y : ys) {
            const double d = 2.0 * model.sigma(y) * model.dsigma(y);
            const double ratio = std::abs(d) / (1.0 + std::pow(y, 8));
            if (ratio > worst) {
                worst = ratio;
                arg_y = y;
            }
        }
        rep.clauses.push_back({"sigma2_prime_poly_growth", std::isfinite(worst), true, arg_y,
                               "max (sigma^2)'/(1+y^8) = " + fmt(worst)});
    }

    // Informational: b^2(y) = O(y) as y->0, used by the boundary-continuity
    // argument but absent from the standing assumptions.
    {
        double worst = 0.0, arg_y = ys.front();
        for (double y : ys) {
            if (y > 0.1) break;
            const double v = model.b(y);
            const double ratio = v * v / y;
            if (ratio > worst) {
                worst = ratio;
                arg_y = y;
            }
        }
        rep.clauses.push_back({"b2_order_y_at_origin", std::isfinite(worst), true, arg_y,
                               "sup b^2(y)/y = " + fmt(worst) + " on y<=0.1"});
    }

    return rep;
}

std::vector<double> default_y_samples(double y_max) {
    if (!(y_max > 0.0)) throw parameter_error("default_y_samples: y_max must be > 0");
    std::vector<double> ys;
    for (double y = 1e-4; y < std::min(0.01, y_max); y *= 2.0) ys.push_back(y);
    const int n_lin = 64;
    const double lo = std::min(0.01, y_max);
    for (int i = 0; i <= n_lin; ++i) {
        const double y = lo + (y_max - lo) * static_cast<double>(i) / n_lin;
        if (ys.empty() || y > ys.back()) ys.push_back(y);
    }
    return ys;
}

namespace {

double require_number(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key))
        throw config_error(std::string("model: missing required key '") + key + "'");
    const auto& v = doc.at(key);
    if (!v.is_number()) throw config_error(std::string("model: key '") + key + "' must be a number");
    return v.get<double>();
}

void reject_unknown_keys(const nlohmann::json& doc, std::initializer_list<const char*> known) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw config_error("model: unknown key 'model." + it.key() + "'");
    }
}

std::map<std::string, ModelFactory>& registry() {
    static std::map<std::string, ModelFactory> reg = {
        {"heston",
         [](const nlohmann::json& doc) {
             reject_unknown_keys(doc, {"model", "kappa", "m", "xi", "rho", "r", "K", "T"});
             return heston_model(require_number(doc, "kappa"), require_number(doc, "m"),
                                 require_number(doc, "xi"), require_number(doc, "rho"),
                                 require_number(doc, "r"), require_number(doc, "K"),
                                 require_number(doc, "T"));
         }},
        {"absorbed",
         [](const nlohmann::json& doc) {
             reject_unknown_keys(doc, {"model", "kappa", "xi", "rho", "r", "K", "T"});
             return absorbed_model(require_number(doc, "kappa"), require_number(doc, "xi"),
                                   require_number(doc, "rho"), require_number(doc, "r"),
                                   require_number(doc, "K"), require_number(doc, "T"));
         }},
    };
    return reg;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

SVModel model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw config_error("model: block must be a JSON object");
    if (!doc.contains("model") || !doc.at("model").is_string())
        throw config_error("model: missing required string key 'model'");
    const std::string name = doc.at("model").get<std::string>();
    ModelFactory factory;
    {
        std::lock_guard<std::mutex> lock(registry_mutex());
        auto it = registry().find(name);
        if (it == registry().end())
            throw config_error("model: unknown model name '" + name + "'");
        factory = it->second;
    }
    return factory(doc);
}

void register_model(const std::string& name, ModelFactory factory) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[name] = std::move(factory);
}

} // namespace svput

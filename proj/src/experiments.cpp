#include "ballrgg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "ballrgg/consistency.hpp"
#include "ballrgg/errors.hpp"
#include "ballrgg/estimators.hpp"
#include "ballrgg/io.hpp"
#include "ballrgg/matrix_ops.hpp"
#include "ballrgg/rng.hpp"
#include "ballrgg/sampling.hpp"
#include "ballrgg/spectrum.hpp"

namespace ballrgg::experiments {

using nlohmann::json;

namespace {

template <class T>
T extra_or(const ExperimentConfig& cfg, const char* key, T fallback) {
    if (!cfg.extra.contains(key)) return fallback;
    try {
        return cfg.extra.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("extra.{}: {}", key, e.what()));
    }
}

// Status column for a failed replication.
std::string status_of(const std::exception& e) {
    if (const auto* c = dynamic_cast<const ClusterError*>(&e)) {
        return c->kind() == ClusterFailure::NoIsolatedCluster ? "NoIsolatedCluster" : "AmbiguousCluster";
    }
    if (dynamic_cast<const GapDegenerateError*>(&e)) return "GapDegenerate";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    return "error";
}

struct Job {
    int n;
    int rep;
};

std::vector<Job> jobs_of(const ExperimentConfig& cfg) {
    std::vector<Job> jobs;
    for (int n : cfg.n_values) {
        for (int r = 0; r < cfg.replications; ++r) jobs.push_back({n, r});
    }
    return jobs;
}

// Runs body(job, slot) over all jobs, in parallel, results stored by index.
template <class R, class F>
std::vector<R> run_jobs(const std::vector<Job>& jobs, F body) {
    std::vector<R> out(jobs.size());
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        R& slot = out[static_cast<std::size_t>(k)];
        try {
            body(jobs[static_cast<std::size_t>(k)], slot);
        } catch (const std::exception& e) {
            slot.status = status_of(e);
            slot.message = e.what();
        }
    }
    return out;
}

struct Sample {
    LatentSample latent;
    Graph graph;
};

Sample draw(const ExperimentConfig& cfg, const ModelConfig& model, int n, int rep) {
    const std::uint64_t key = replication_seed(cfg.seed, cfg.experiment, n, rep);
    auto latent = sample_latent(model, n, rng::stream_key(key, {0}), Exec::Serial);
    auto graph = sample_graph(latent, rng::stream_key(key, {1}), Exec::Serial);
    return {std::move(latent), std::move(graph)};
}

// Groups (key, value, ok) rows in first-appearance order.
class Aggregator {
public:
    void add(const std::vector<std::string>& key, double value, bool ok) {
        auto it = std::find(keys_.begin(), keys_.end(), key);
        std::size_t g = static_cast<std::size_t>(it - keys_.begin());
        if (it == keys_.end()) {
            keys_.push_back(key);
            values_.emplace_back();
            totals_.push_back(0);
        }
        ++totals_[g];
        if (ok) values_[g].push_back(value);
    }

    void write(std::ostream& os, const std::vector<std::string_view>& key_names) const {
        io::CsvWriter w(os);
        for (auto k : key_names) w.field(k);
        w.field("replications").field("count").field("median").field("q25").field("q75");
        w.end_row();
        for (std::size_t g = 0; g < keys_.size(); ++g) {
            for (const auto& k : keys_[g]) w.field(k);
            w.field(totals_[g]).field(values_[g].size());
            if (values_[g].empty()) {
                w.field("").field("").field("");
            } else {
                const Summary s = summarize(values_[g]);
                w.field(s.median).field(s.q25).field(s.q75);
            }
            w.end_row();
        }
    }

    std::vector<double> medians() const {
        std::vector<double> m;
        for (const auto& v : values_) m.push_back(v.empty() ? std::nan("") : summarize(v).median);
        return m;
    }

private:
    std::vector<std::vector<std::string>> keys_;
    std::vector<std::vector<double>> values_;
    std::vector<std::size_t> totals_;
};

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

class Output {
public:
    explicit Output(const ExperimentConfig& cfg) : dir_(cfg.output_dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output_dir " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (dir_ / name).string());
        files_.push_back(name);
        return os;
    }

    const std::vector<std::string>& files() const { return files_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

std::string key_str(int n) { return fmt::format("{}", n); }

// ---------------------------------------------------------------- norm-recovery

struct NormRep {
    double value = 0.0;
    int qualifying = 0;
    int isolated = 0;
    std::string status = "ok";
    std::string message;
    std::vector<double> true_sorted;
    std::vector<double> est_sorted;
};

json run_norm_recovery(const ExperimentConfig& cfg, Output& out, int& errors) {
    ModelConfig model = cfg.model;
    if (cfg.extra.contains("tau")) model.link = link::Threshold{extra_or(cfg, "tau", 0.1)};
    const auto* thr = model.link.get_if<link::Threshold>();
    if (!thr) throw ConfigError("norm-recovery needs a threshold link (model.link or extra.tau)");
    const double tau = thr->tau;
    const int n_last = cfg.n_values.back();

    const auto jobs = jobs_of(cfg);
    const auto reps = run_jobs<NormRep>(jobs, [&](const Job& job, NormRep& slot) {
        const Sample s = draw(cfg, model, job.n, job.rep);
        const auto est = estimators::estimate_norms(s.graph, tau, model);
        for (Eigen::Index i = 0; i < s.latent.size(); ++i) {
            if (s.latent.norms()[i] >= tau) ++slot.qualifying;
            if (est.isolated[static_cast<std::size_t>(i)]) ++slot.isolated;
        }
        slot.value = estimators::norm_error(est, s.latent, tau);
        if (job.n == n_last && job.rep == 0) {
            slot.true_sorted.assign(s.latent.norms().begin(), s.latent.norms().end());
            slot.est_sorted.assign(est.zeta_hat.begin(), est.zeta_hat.end());
            std::sort(slot.true_sorted.begin(), slot.true_sorted.end());
            std::sort(slot.est_sorted.begin(), slot.est_sorted.end());
        }
    });

    Aggregator agg;
    {
        auto os = out.open("norm_recovery_raw.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "value", "log_value", "qualifying", "isolated", "status", "message"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto& r = reps[k];
            const bool ok = r.status == "ok";
            errors += ok ? 0 : 1;
            w.field(jobs[k].n).field(jobs[k].rep);
            if (ok) {
                w.field(r.value).field(std::log(r.value));
            } else {
                w.field("").field("");
            }
            w.field(r.qualifying).field(r.isolated).field(r.status).field(r.message);
            w.end_row();
            agg.add({key_str(jobs[k].n)}, r.value, ok);
        }
    }
    {
        auto os = out.open("norm_recovery_aggregated.csv");
        agg.write(os, {"n"});
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (jobs[k].n != n_last || jobs[k].rep != 0 || reps[k].true_sorted.empty()) continue;
        auto os = out.open("norm_recovery_sorted_norms.csv");
        io::CsvWriter w(os);
        w.header({"rank", "true_norm", "zeta_hat"});
        for (std::size_t i = 0; i < reps[k].true_sorted.size(); ++i) {
            w.field(i).field(reps[k].true_sorted[i]).field(reps[k].est_sorted[i]);
            w.end_row();
        }
    }
    return {{"median_strictly_decreasing", strictly_decreasing(agg.medians())}, {"tau", tau}};
}

// ---------------------------------------------------------------- gram-recovery

struct GramRep {
    double value = 0.0;
    bool strict_ok = false;
    bool fell_back = false;
    double cluster_min = 0.0;
    double cluster_max = 0.0;
    std::string status = "ok";
    std::string message;
};

estimators::ClusterMode cluster_mode_of(const std::string& s) {
    if (s == "strict") return estimators::ClusterMode::Strict;
    if (s == "nearest") return estimators::ClusterMode::Nearest;
    if (s == "fallback") return estimators::ClusterMode::StrictWithFallback;
    throw ConfigError("extra.cluster_mode must be one of strict, nearest, fallback");
}

json run_gram_recovery(const ExperimentConfig& cfg, Output& out, int& errors) {
    const ModelConfig& model = cfg.model;
    try {
        model.validate_positive_nu();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("gram-recovery: ") + e.what());
    }
    const int n_max = extra_or(cfg, "N_max", spectrum::kDefaultMaxDegree);
    const int m_quad = extra_or(cfg, "m_quad", spectrum::kDefaultQuadrature);
    const bool renormalize = extra_or(cfg, "renormalize_rows", false);
    const auto mode = cluster_mode_of(extra_or<std::string>(cfg, "cluster_mode", "fallback"));
    const auto* thr = model.link.get_if<link::Threshold>();
    if (renormalize && !thr) throw ConfigError("extra.renormalize_rows needs a threshold link");
    for (int n : cfg.n_values) {
        if (n < model.d + 1) throw ConfigError("gram-recovery: every n must exceed d");
    }

    const auto summary = spectrum::spectrum_summary(model, n_max, m_quad);
    {
        auto os = out.open("gram_recovery_spectrum.csv");
        spectrum::write_spectrum_csv(os, summary);
    }

    const auto jobs = jobs_of(cfg);
    const auto reps = run_jobs<GramRep>(jobs, [&](const Job& job, GramRep& slot) {
        const Sample s = draw(cfg, model, job.n, job.rep);
        estimators::GramOptions opt;
        opt.mode = mode;
        opt.renormalize_rows = renormalize;
        if (renormalize) opt.norms = estimators::estimate_norms(s.graph, thr->tau, model).zeta_hat;
        const auto est = estimators::estimate_gram(s.graph, model, summary, opt);
        slot.value = estimators::gram_error(est, s.latent);
        slot.strict_ok = est.strict_ok;
        slot.fell_back = est.fell_back;
        slot.cluster_min = *std::min_element(est.cluster_values.begin(), est.cluster_values.end());
        slot.cluster_max = *std::max_element(est.cluster_values.begin(), est.cluster_values.end());
    });

    Aggregator agg;
    int strict_count = 0;
    {
        auto os = out.open("gram_recovery_raw.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "value", "strict_ok", "fell_back", "cluster_min", "cluster_max", "status", "message"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto& r = reps[k];
            const bool ok = r.status == "ok";
            errors += ok ? 0 : 1;
            strict_count += ok && r.strict_ok ? 1 : 0;
            w.field(jobs[k].n).field(jobs[k].rep);
            if (ok) {
                w.field(r.value).field(r.strict_ok ? 1 : 0).field(r.fell_back ? 1 : 0).field(r.cluster_min).field(r.cluster_max);
            } else {
                w.field("").field("").field("").field("").field("");
            }
            w.field(r.status).field(r.message);
            w.end_row();
            agg.add({key_str(jobs[k].n)}, r.value, ok);
        }
    }
    {
        auto os = out.open("gram_recovery_aggregated.csv");
        agg.write(os, {"n"});
    }
    return {{"lambda1", summary.lambda1()},
            {"gap", summary.gap},
            {"recovery_scale", summary.recovery_scale},
            {"strict_clusters", strict_count},
            {"median_strictly_decreasing", strictly_decreasing(agg.medians())}};
}

// ---------------------------------------------------------------- gap-sweep

constexpr int kSweepEigenvalues = 10;

struct SweepRep {
    std::vector<double> top;  // by |value|, descending
    std::string status = "ok";
    std::string message;
};

json run_gap_sweep(const ExperimentConfig& cfg, Output& out, int& errors) {
    const auto r_values = extra_or(cfg, "r_values", std::vector<double>{-5.0, -3.0, -1.0, -0.1});
    if (r_values.empty()) throw ConfigError("extra.r_values must be nonempty");
    const int n_max = extra_or(cfg, "N_max", spectrum::kDefaultMaxDegree);
    const int m_quad = extra_or(cfg, "m_quad", spectrum::kDefaultQuadrature);

    std::vector<spectrum::SpectrumSummary> summaries;
    for (double r : r_values) {
        ModelConfig model = cfg.model;
        model.link = link::Logistic{r};
        summaries.push_back(spectrum::spectrum_summary(model, n_max, m_quad));
    }
    {
        auto os = out.open("gap_sweep_operator.csv");
        io::CsvWriter w(os);
        w.header({"r", "degree", "lambda_star", "multiplicity"});
        for (std::size_t i = 0; i < r_values.size(); ++i) {
            for (int n = 0; n < kSweepEigenvalues && n <= summaries[i].max_degree(); ++n) {
                const auto& e = summaries[i].lambdas[static_cast<std::size_t>(n)];
                w.field(r_values[i]).field(e.n).field(e.lambda_star).field(e.multiplicity);
                w.end_row();
            }
        }
    }
    std::vector<double> gaps;
    {
        auto os = out.open("gap_sweep_gaps.csv");
        io::CsvWriter w(os);
        w.header({"r", "lambda1", "gap", "gap_degenerate"});
        for (std::size_t i = 0; i < r_values.size(); ++i) {
            gaps.push_back(summaries[i].gap);
            w.field(r_values[i]).field(summaries[i].lambda1()).field(summaries[i].gap).field(summaries[i].gap_degenerate ? 1 : 0);
            w.end_row();
        }
    }

    // Same latent points for every r (common random numbers).
    std::vector<Job> jobs;
    std::vector<std::size_t> r_index;
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        for (const Job& j : jobs_of(cfg)) {
            jobs.push_back(j);
            r_index.push_back(i);
        }
    }
    std::vector<SweepRep> reps(jobs.size());
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        auto& slot = reps[static_cast<std::size_t>(k)];
        const Job job = jobs[static_cast<std::size_t>(k)];
        try {
            ModelConfig model = cfg.model;
            model.link = link::Logistic{r_values[r_index[static_cast<std::size_t>(k)]]};
            const Sample s = draw(cfg, model, job.n, job.rep);
            const Eigen::VectorXd ev = linalg::sym_eigenvalues(linalg::that_n_matrix(s.graph));
            std::vector<double> v(ev.begin(), ev.end());
            std::stable_sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
            v.resize(std::min<std::size_t>(v.size(), kSweepEigenvalues));
            slot.top = std::move(v);
        } catch (const std::exception& e) {
            slot.status = status_of(e);
            slot.message = e.what();
        }
    }

    Aggregator agg;
    {
        auto os = out.open("gap_sweep_raw.csv");
        io::CsvWriter w(os);
        w.header({"r", "n", "rep", "rank", "value", "status", "message"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto& r = reps[k];
            const double rv = r_values[r_index[k]];
            if (r.status != "ok") {
                ++errors;
                w.field(rv).field(jobs[k].n).field(jobs[k].rep).field("").field("").field(r.status).field(r.message);
                w.end_row();
                continue;
            }
            for (std::size_t q = 0; q < r.top.size(); ++q) {
                w.field(rv).field(jobs[k].n).field(jobs[k].rep).field(q).field(r.top[q]).field("ok").field("");
                w.end_row();
                agg.add({fmt::format("{}", rv), key_str(jobs[k].n), fmt::format("{}", q)}, r.top[q], true);
            }
        }
    }
    {
        auto os = out.open("gap_sweep_aggregated.csv");
        agg.write(os, {"r", "n", "rank"});
    }
    // r sorted toward 0 from below should shrink the gap.
    std::vector<std::pair<double, double>> by_r;
    for (std::size_t i = 0; i < r_values.size(); ++i) by_r.emplace_back(r_values[i], gaps[i]);
    std::sort(by_r.begin(), by_r.end());
    bool shrinking = true;
    for (std::size_t i = 1; i < by_r.size(); ++i) {
        if (by_r[i].first < 0.0 && !(by_r[i].second < by_r[i - 1].second)) shrinking = false;
    }
    return {{"gaps", gaps}, {"gap_decreasing_as_r_to_zero", shrinking}};
}

// ---------------------------------------------------------------- degree-histogram

struct HistRep {
    int max_degree = 0;
    double median_degree = 0.0;
    std::vector<std::int64_t> counts;
    std::string status = "ok";
    std::string message;
};

json run_degree_histogram(const ExperimentConfig& cfg, Output& out, int& errors) {
    ModelConfig model = cfg.model;
    if (cfg.extra.contains("alpha")) model.link = link::PowerLaw{extra_or(cfg, "alpha", 1e-3)};
    const int min_degree = extra_or(cfg, "hist_min_degree", 300);

    const auto jobs = jobs_of(cfg);
    const auto reps = run_jobs<HistRep>(jobs, [&](const Job& job, HistRep& slot) {
        const Sample s = draw(cfg, model, job.n, job.rep);
        std::vector<double> deg(s.graph.degrees().begin(), s.graph.degrees().end());
        slot.max_degree = static_cast<int>(*std::max_element(deg.begin(), deg.end()));
        slot.median_degree = quantile(deg, 0.5);
        slot.counts.assign(static_cast<std::size_t>(slot.max_degree) + 1, 0);
        for (int d : s.graph.degrees()) ++slot.counts[static_cast<std::size_t>(d)];
    });

    Aggregator agg;
    int hubs = 0;
    {
        auto os = out.open("degree_histogram_raw.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "value", "median_degree", "hub_ratio", "status", "message"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto& r = reps[k];
            const bool ok = r.status == "ok";
            errors += ok ? 0 : 1;
            w.field(jobs[k].n).field(jobs[k].rep);
            if (ok) {
                const double ratio = r.median_degree > 0 ? r.max_degree / r.median_degree : std::nan("");
                hubs += ratio > 10.0 ? 1 : 0;
                w.field(r.max_degree).field(r.median_degree).field(ratio);
            } else {
                w.field("").field("").field("");
            }
            w.field(r.status).field(r.message);
            w.end_row();
            agg.add({key_str(jobs[k].n)}, r.max_degree, ok);
        }
    }
    {
        auto os = out.open("degree_histogram_aggregated.csv");
        agg.write(os, {"n"});
    }
    {
        auto os = out.open("degree_histogram_counts.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "degree", "count"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            for (std::size_t d = 0; d < reps[k].counts.size(); ++d) {
                w.field(jobs[k].n).field(jobs[k].rep).field(d).field(reps[k].counts[d]);
                w.end_row();
            }
        }
    }
    {
        auto os = out.open("degree_histogram_tail.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "degree", "count", "log10_degree", "log10_count"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            for (std::size_t d = static_cast<std::size_t>(std::max(min_degree + 1, 1)); d < reps[k].counts.size(); ++d) {
                const auto c = reps[k].counts[d];
                if (c == 0) continue;
                w.field(jobs[k].n).field(jobs[k].rep).field(d).field(c);
                w.field(std::log10(static_cast<double>(d))).field(std::log10(static_cast<double>(c)));
                w.end_row();
            }
        }
    }
    return {{"hist_min_degree", min_degree}, {"replications_with_hub_ratio_above_10", hubs}};
}

// ---------------------------------------------------------------- spectrum-dump

struct DumpRep {
    double delta2 = 0.0;
    double op_deviation = 0.0;
    std::string status = "ok";
    std::string message;
};

json run_spectrum_dump(const ExperimentConfig& cfg, Output& out, int& errors) {
    const ModelConfig& model = cfg.model;
    const int n_max = extra_or(cfg, "N_max", spectrum::kDefaultMaxDegree);
    const int m_quad = extra_or(cfg, "m_quad", spectrum::kDefaultQuadrature);
    const auto summary = spectrum::spectrum_summary(model, n_max, m_quad);
    {
        auto os = out.open("spectrum.csv");
        spectrum::write_spectrum_csv(os, summary);
    }
    {
        auto os = out.open("spectrum_summary.csv");
        io::CsvWriter w(os);
        w.header({"key", "value"});
        w.field("gamma_nu").field(summary.gamma_nu).end_row();
        w.field("lambda1").field(summary.lambda1()).end_row();
        w.field("gap").field(summary.gap).end_row();
        w.field("c_nu").field(summary.c_nu).end_row();
        w.field("c_tilde").field(summary.c_tilde).end_row();
        w.field("recovery_scale").field(summary.recovery_scale).end_row();
        w.field("gap_degenerate").field(summary.gap_degenerate ? 1 : 0).end_row();
    }

    const auto jobs = jobs_of(cfg);
    const auto reps = run_jobs<DumpRep>(jobs, [&](const Job& job, DumpRep& slot) {
        const Sample s = draw(cfg, model, job.n, job.rep);
        const Eigen::MatrixXd tn = linalg::tn_matrix(s.latent, Exec::Serial);
        const Eigen::VectorXd ev = linalg::sym_eigenvalues(tn);
        const auto op = spectrum::expanded_spectrum(summary, static_cast<std::size_t>(job.n));
        slot.delta2 = linalg::delta2(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())), op);
        slot.op_deviation = std::sqrt(static_cast<double>(job.n)) * linalg::operator_norm(linalg::that_n_matrix(s.graph) - tn);
    });

    Aggregator agg;
    Aggregator agg_op;
    {
        auto os = out.open("spectrum_dump_raw.csv");
        io::CsvWriter w(os);
        w.header({"n", "rep", "value", "op_deviation", "status", "message"});
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const auto& r = reps[k];
            const bool ok = r.status == "ok";
            errors += ok ? 0 : 1;
            w.field(jobs[k].n).field(jobs[k].rep);
            if (ok) {
                w.field(r.delta2).field(r.op_deviation);
            } else {
                w.field("").field("");
            }
            w.field(r.status).field(r.message);
            w.end_row();
            agg.add({key_str(jobs[k].n)}, r.delta2, ok);
            agg_op.add({key_str(jobs[k].n)}, r.op_deviation, ok);
        }
    }
    {
        auto os = out.open("spectrum_dump_aggregated.csv");
        agg.write(os, {"n"});
    }
    {
        auto os = out.open("spectrum_dump_op_deviation_aggregated.csv");
        agg_op.write(os, {"n"});
    }
    return {{"gap", summary.gap},
            {"recovery_scale", summary.recovery_scale},
            {"delta2_median_strictly_decreasing", strictly_decreasing(agg.medians())}};
}

// ---------------------------------------------------------------- consistency-suite

json run_consistency(const ExperimentConfig& cfg, Output& out, int& failed) {
    const auto checks = consistency::consistency_suite(cfg.seed);
    json report = json::object();
    {
        auto os = out.open("consistency_raw.csv");
        io::CsvWriter w(os);
        w.header({"check", "status", "value", "tolerance", "detail"});
        for (const auto& c : checks) {
            w.field(c.name).field(c.passed ? "pass" : "fail").field(c.value).field(c.tolerance).field(c.detail);
            w.end_row();
            report[c.name] = c.passed ? "pass" : "fail";
            failed += c.passed ? 0 : 1;
        }
    }
    {
        auto os = out.open("consistency_aggregated.csv");
        io::CsvWriter w(os);
        w.header({"checks", "passed", "failed"});
        w.field(checks.size()).field(static_cast<std::int64_t>(checks.size()) - failed).field(failed);
        w.end_row();
    }
    return report;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    return {{"ballrgg", std::string(kVersion)},
            {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION},
            {"fmt", FMT_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                          NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t seed, std::string_view experiment, int n, int r) {
    return rng::stream_key(seed, {rng::fnv1a(experiment), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw DomainError("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    return {v.size(), quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)};
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig cfg;
    try {
        cfg.experiment = j.at("experiment").get<std::string>();
        if (std::find(std::begin(kExperimentNames), std::end(kExperimentNames), cfg.experiment) ==
            std::end(kExperimentNames)) {
            throw ConfigError("unknown experiment '" + cfg.experiment + "'");
        }
        if (j.contains("model")) {
            cfg.model = model_from_json(j.at("model"));
        } else if (cfg.experiment != "consistency-suite") {
            throw ConfigError("missing key 'model'");
        }
        if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
        if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("extra")) {
            if (!j.at("extra").is_object()) throw ConfigError("'extra' must be an object");
            cfg.extra = j.at("extra");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    if (cfg.experiment != "consistency-suite") {
        if (cfg.n_values.empty()) throw ConfigError("n_values must be nonempty");
        for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
            if (cfg.n_values[i] < 2) throw ConfigError("n_values entries must be >= 2");
            if (i > 0 && cfg.n_values[i] <= cfg.n_values[i - 1]) throw ConfigError("n_values must be strictly ascending");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json to_json(const ExperimentConfig& cfg) {
    json model;
    ballrgg::to_json(model, cfg.model);
    return {{"experiment", cfg.experiment},   {"model", model},
            {"n_values", cfg.n_values},       {"replications", cfg.replications},
            {"seed", cfg.seed},               {"output_dir", cfg.output_dir.string()},
            {"extra", cfg.extra}};
}

RunResult run(const ExperimentConfig& cfg) {
    linalg::set_blas_threads(1);
    Output out(cfg);
    RunResult result;
    json checks;
    if (cfg.experiment == "norm-recovery") {
        checks = run_norm_recovery(cfg, out, result.estimation_errors);
    } else if (cfg.experiment == "gram-recovery") {
        checks = run_gram_recovery(cfg, out, result.estimation_errors);
    } else if (cfg.experiment == "gap-sweep") {
        checks = run_gap_sweep(cfg, out, result.estimation_errors);
    } else if (cfg.experiment == "degree-histogram") {
        checks = run_degree_histogram(cfg, out, result.estimation_errors);
    } else if (cfg.experiment == "spectrum-dump") {
        checks = run_spectrum_dump(cfg, out, result.estimation_errors);
    } else if (cfg.experiment == "consistency-suite") {
        checks = run_consistency(cfg, out, result.failed_checks);
    } else {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    }
    result.files = out.files();
    result.files.push_back("manifest.json");
    result.manifest = {{"config", to_json(cfg)},
                       {"files", result.files},
                       {"versions", versions()},
                       {"checks", checks},
                       {"estimation_errors", result.estimation_errors},
                       {"threads", omp_get_max_threads()},
                       {"timestamp", utc_timestamp()}};
    std::ofstream os(out.dir() / "manifest.json");
    if (!os) throw ConfigError("cannot write manifest.json");
    os << result.manifest.dump(2) << '\n';
    return result;
}

}  // namespace ballrgg::experiments

#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <optional>
#include <sstream>

#include "ordembed/common.hpp"
#include "ordembed/comparisons.hpp"
#include "ordembed/domain.hpp"
#include "ordembed/embedders.hpp"
#include "ordembed/io.hpp"
#include "ordembed/metrics.hpp"

namespace ordembed {

// n-dependent parameter schedule: a constant, a multiple of diam(U), a
// power law c * n^e, or ceil(sqrt(n)).
struct Schedule {
    enum class Kind { Const, DiamFactor, Pow, CeilSqrt };
    Kind kind = Kind::Const;
    double a = 0.0, b = 0.0;

    double eval(int n, double diam) const {
        switch (kind) {
            case Kind::Const: return a;
            case Kind::DiamFactor: return a * diam;
            case Kind::Pow: return a * std::pow(static_cast<double>(n), b);
            case Kind::CeilSqrt: return std::ceil(std::sqrt(static_cast<double>(n)));
        }
        return a;
    }

    static Schedule parse(const Json& j) {
        Schedule s;
        if (j.is_string()) {
            if (j.get<std::string>() == "ceil_sqrt") {
                s.kind = Kind::CeilSqrt;
                return s;
            }
            throw ConfigError("unknown schedule string: " + j.get<std::string>());
        }
        if (j.is_number()) {
            s.a = j.get<double>();
            return s;
        }
        if (j.contains("const")) {
            s.a = j.at("const").get<double>();
        } else if (j.contains("diam_factor")) {
            s.kind = Kind::DiamFactor;
            s.a = j.at("diam_factor").get<double>();
        } else if (j.contains("pow")) {
            s.kind = Kind::Pow;
            s.a = j.at("pow").at(0).get<double>();
            s.b = j.at("pow").at(1).get<double>();
        } else {
            throw ConfigError("unknown schedule object");
        }
        return s;
    }
};

struct DesignDescriptor {
    DesignKind kind = DesignKind::Quadruple;
    Schedule radius;     // local designs
    Schedule landmarks;  // landmark designs
};

struct EmbedderDescriptor {
    enum class Kind { Refine, Landmark, Rejection };
    Kind kind = Kind::Refine;
    RefineSchedule schedule;
    Stage1 stage1 = Stage1::Refine;
    int cell_samples = 2000;
    std::uint64_t max_draws = 10000000;
};

struct ExperimentConfig {
    std::vector<Ball> domain_balls;
    int dim = 2;
    std::vector<int> n_grid;
    int trials = 20;
    std::uint64_t master_seed = 1;
    DesignDescriptor design;
    EmbedderDescriptor embedder;
    double eps_resolution = 0.0;  // 0: pick from diam and dim
    double restrict_core_h = 0.0; // >0: restrict alignment to U^h
    std::string predictor;        // "eps", "eps_over_r2", "eta"; default per design
    std::string output_dir = "out";

    DomainSpec domain() const { return DomainSpec(domain_balls); }

    static ExperimentConfig parse(const Json& j);
    void validate() const;
};

inline ExperimentConfig ExperimentConfig::parse(const Json& j) {
    ExperimentConfig c;
    for (const auto& b : j.at("domain").at("balls"))
        c.domain_balls.push_back(Ball{vec_from_json(b.at("center")), b.at("radius").get<double>()});
    c.dim = j.value("dim", static_cast<int>(c.domain_balls.empty() ? 2 : c.domain_balls[0].center.size()));
    for (const auto& n : j.at("n_grid")) c.n_grid.push_back(n.get<int>());
    c.trials = j.value("trials", 20);
    c.master_seed = j.value("master_seed", static_cast<std::uint64_t>(1));
    const auto& dj = j.at("design");
    const std::string kind = dj.at("kind").get<std::string>();
    if (kind == "quadruple") {
        c.design.kind = DesignKind::Quadruple;
    } else if (kind == "triple") {
        c.design.kind = DesignKind::Triple;
    } else if (kind == "local") {
        c.design.kind = DesignKind::LocalRadius;
        c.design.radius = Schedule::parse(dj.at("r"));
    } else if (kind == "landmark") {
        const std::string flavor = dj.value("flavor", std::string("quadruple"));
        c.design.kind = flavor == "triple" ? DesignKind::LandmarkTriple : DesignKind::LandmarkQuadruple;
        c.design.landmarks = Schedule::parse(dj.at("ell"));
    } else {
        throw ConfigError("unknown design kind: " + kind);
    }
    if (j.contains("embedder")) {
        const auto& ej = j.at("embedder");
        const std::string ek = ej.value("kind", std::string("refine"));
        if (ek == "refine") {
            c.embedder.kind = EmbedderDescriptor::Kind::Refine;
        } else if (ek == "landmark") {
            c.embedder.kind = EmbedderDescriptor::Kind::Landmark;
            c.embedder.stage1 = ej.value("stage1", std::string("refine")) == "exact" ? Stage1::Exact
                                                                                      : Stage1::Refine;
            c.embedder.cell_samples = ej.value("cell_samples", 2000);
        } else if (ek == "rejection") {
            c.embedder.kind = EmbedderDescriptor::Kind::Rejection;
            c.embedder.max_draws = ej.value("max_draws", static_cast<std::uint64_t>(10000000));
        } else {
            throw ConfigError("unknown embedder kind: " + ek);
        }
        c.embedder.schedule.restarts = ej.value("restarts", c.embedder.schedule.restarts);
        c.embedder.schedule.iters = ej.value("iters", c.embedder.schedule.iters);
        c.embedder.schedule.batch = ej.value("batch", c.embedder.schedule.batch);
    } else if (c.design.kind == DesignKind::LandmarkTriple ||
               c.design.kind == DesignKind::LandmarkQuadruple) {
        c.embedder.kind = EmbedderDescriptor::Kind::Landmark;
    }
    c.eps_resolution = j.value("eps_resolution", 0.0);
    c.restrict_core_h = j.value("restrict_core_h", 0.0);
    c.predictor = j.value("predictor", std::string());
    c.output_dir = j.value("output_dir", std::string("out"));
    c.validate();
    return c;
}

inline void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw ConfigError("n_grid must be nonempty");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
    if (trials < 1) throw ConfigError("need at least one trial");
    DomainSpec dom(domain_balls);  // validates geometry
    const double diam = dom.diameter();
    for (int n : n_grid) {
        if (n < dim + 1) throw ConfigError("n must exceed the dimension");
        if (design.kind == DesignKind::LocalRadius) {
            const double r = design.radius.eval(n, diam);
            if (!(r > 0.0)) throw ConfigError("radius schedule must be positive for every n");
        }
        if (design.kind == DesignKind::LandmarkTriple || design.kind == DesignKind::LandmarkQuadruple) {
            const double l = design.landmarks.eval(n, diam);
            if (l < dim + 1 || l > n) throw ConfigError("landmark schedule out of range");
        }
    }
}

struct RateRecord {
    int n = 0;
    int trial = 0;
    double eps_n = 0.0;
    double r_n = std::numeric_limits<double>::quiet_NaN();
    double ell_n = std::numeric_limits<double>::quiet_NaN();
    double eta_n = std::numeric_limits<double>::quiet_NaN();
    double sup_error = 0.0;
    double rms_error = 0.0;
    std::uint64_t violations = 0;
    std::uint64_t outside_violations = 0;
    std::uint64_t stage1_violations = 0;
    std::uint64_t fallbacks = 0;
    bool success = false;
    double wall_time = 0.0;
};

struct RateExperimentResult {
    std::vector<RateRecord> records;
    std::optional<double> slope;   // OLS log(sup_error) ~ log(predictor), successes only
    std::string predictor_name;
    int excluded = 0;              // flagged records left out of the slope fit
};

inline double record_predictor(const RateRecord& rec, const std::string& name) {
    if (name == "eps") return rec.eps_n;
    if (name == "eps_over_r2") return rec.eps_n / (rec.r_n * rec.r_n);
    if (name == "eta") return rec.eta_n;
    throw ConfigError("unknown predictor: " + name);
}

inline RateExperimentResult run_rate_experiment(const ExperimentConfig& config) {
    DomainSpec dom = config.domain();
    const double diam = dom.diameter();
    const int d = config.dim;
    double res = config.eps_resolution;
    if (res <= 0.0) res = d == 1 ? diam / 2000.0 : diam / 150.0;

    std::string predictor = config.predictor;
    if (predictor.empty()) {
        switch (config.design.kind) {
            case DesignKind::LocalRadius: predictor = "eps_over_r2"; break;
            case DesignKind::LandmarkTriple:
            case DesignKind::LandmarkQuadruple: predictor = "eta"; break;
            default: predictor = "eps"; break;
        }
    }

    RateExperimentResult result;
    result.predictor_name = predictor;
    const int n_max = config.n_grid.back();

    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(trial));
        // nested clouds: Omega_n is the prefix of one sampled stream
        PointCloud full = sample_domain(dom, static_cast<std::size_t>(n_max), trial_seed);
        for (int n : config.n_grid) {
            detail::Stopwatch timer;
            PointCloud cloud;
            cloud.dim = full.dim;
            cloud.seed = trial_seed;
            cloud.points.assign(full.points.begin(), full.points.begin() + n);
            auto oracle = std::make_shared<DissimilarityOracle>(cloud);

            RateRecord rec;
            rec.n = n;
            rec.trial = trial;
            rec.eps_n = hausdorff_density(cloud, dom, res);

            std::optional<ComparisonSet> cset;
            switch (config.design.kind) {
                case DesignKind::Quadruple: cset = design_quadruple(oracle); break;
                case DesignKind::Triple: cset = design_triple(oracle); break;
                case DesignKind::LocalRadius: {
                    rec.r_n = config.design.radius.eval(n, diam);
                    cset = design_local(oracle, rec.r_n);
                    break;
                }
                case DesignKind::LandmarkTriple:
                case DesignKind::LandmarkQuadruple: {
                    const int ell = static_cast<int>(config.design.landmarks.eval(n, diam));
                    rec.ell_n = ell;
                    std::vector<int> idx(static_cast<std::size_t>(ell));
                    std::iota(idx.begin(), idx.end(), 0);
                    cset = design_landmark(oracle, LandmarkIndex::of(idx, static_cast<std::size_t>(n)),
                                           config.design.kind == DesignKind::LandmarkQuadruple);
                    std::vector<Vec> lpts(cloud.points.begin(), cloud.points.begin() + ell);
                    rec.eta_n = hausdorff_density(lpts, dom, res);
                    break;
                }
                default: throw ConfigError("unsupported design in rate experiment");
            }

            Embedding emb;
            EmbedReport erep;
            const std::uint64_t embed_seed = derive_seed(trial_seed, static_cast<std::uint64_t>(n));
            switch (config.embedder.kind) {
                case EmbedderDescriptor::Kind::Refine: {
                    auto warm = rank_mds_init(*cset, d);
                    std::tie(emb, erep) = refine_embed(*cset, d, embed_seed, warm, config.embedder.schedule);
                    break;
                }
                case EmbedderDescriptor::Kind::Landmark: {
                    std::tie(emb, erep) = landmark_embed(*cset, d, embed_seed, config.embedder.stage1,
                                                         config.embedder.cell_samples);
                    break;
                }
                case EmbedderDescriptor::Kind::Rejection: {
                    std::tie(emb, erep) = exact_rejection_embed(*cset, d, embed_seed, config.embedder.max_draws);
                    break;
                }
            }
            rec.violations = erep.violations;
            rec.stage1_violations = erep.stage1_violations;
            rec.fallbacks = erep.fallback_count;
            if (config.design.kind == DesignKind::LocalRadius)
                rec.outside_violations = outside_condition_violations(emb, *cset);
            rec.success = rec.violations == 0 && rec.outside_violations == 0;

            std::vector<int> restrict_idx;
            if (config.restrict_core_h > 0.0) {
                for (int i = 0; i < n; ++i)
                    if (dom.contains_in_core(cloud.points[static_cast<std::size_t>(i)], config.restrict_core_h))
                        restrict_idx.push_back(i);
            }
            auto align = alignment_error(emb, cloud, restrict_idx);
            rec.sup_error = align.sup_error;
            rec.rms_error = align.rms_error;
            rec.wall_time = timer.seconds();
            result.records.push_back(rec);
        }
    }

    // slope of log(sup) on log(predictor) over the zero-violation records;
    // undefined unless at least two sample sizes contribute
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    std::set<int> sizes_seen;
    for (const auto& rec : result.records) {
        if (!rec.success) {
            ++result.excluded;
            continue;
        }
        const double p = record_predictor(rec, predictor);
        if (!(p > 0.0) || !(rec.sup_error > 0.0)) continue;
        const double x = std::log(p), y = std::log(rec.sup_error);
        sizes_seen.insert(rec.n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2 && sizes_seen.size() >= 2) {
        const double denom = m * sxx - sx * sx;
        if (denom > 0.0) result.slope = (m * sxy - sx * sy) / denom;
    }
    return result;
}

// ---- report emission ----------------------------------------------------

// The CSV is byte-reproducible for a fixed config and master seed, so the
// wall_time column (which is not) is deliberately omitted.
inline std::string rates_to_csv(const std::vector<RateRecord>& records) {
    std::ostringstream os;
    os << "n,trial,eps_n,r_n,ell_n,eta_n,sup_error,rms_error,violations,outside_violations,"
          "stage1_violations,fallbacks,success\n";
    auto sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const RateRecord& a, const RateRecord& b) {
        return std::tie(a.n, a.trial) < std::tie(b.n, b.trial);
    });
    for (const auto& r : sorted) {
        os << r.n << "," << r.trial << "," << format_double(r.eps_n) << ","
           << format_double(r.r_n) << "," << format_double(r.ell_n) << ","
           << format_double(r.eta_n) << "," << format_double(r.sup_error) << ","
           << format_double(r.rms_error) << "," << r.violations << "," << r.outside_violations
           << "," << r.stage1_violations << "," << r.fallbacks << "," << (r.success ? 1 : 0)
           << "\n";
    }
    return os.str();
}

inline Json rates_summary_json(const RateExperimentResult& result) {
    Json j;
    j["predictor"] = result.predictor_name;
    if (result.slope)
        j["slope"] = *result.slope;
    else
        j["slope"] = nullptr;
    j["excluded"] = result.excluded;
    j["records"] = result.records.size();
    // per-n medians of sup_error and sup/predictor over successes
    std::map<int, std::vector<double>> sup_by_n, ratio_by_n;
    for (const auto& r : result.records) {
        if (!r.success) continue;
        sup_by_n[r.n].push_back(r.sup_error);
        const double p = record_predictor(r, result.predictor_name);
        if (p > 0.0) ratio_by_n[r.n].push_back(r.sup_error / p);
    }
    auto median = [](std::vector<double> v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    Json per_n = Json::array();
    for (const auto& [n, v] : sup_by_n) {
        Json row;
        row["n"] = n;
        row["median_sup_error"] = median(v);
        row["median_ratio"] = median(ratio_by_n[n]);
        row["successes"] = v.size();
        per_n.push_back(row);
    }
    j["per_n"] = per_n;
    return j;
}

// Static log-log scatter of sup_error vs predictor with the fitted line.
inline std::string rates_to_svg(const RateExperimentResult& result) {
    const int w = 560, h = 420, ml = 60, mb = 50, mt = 20, mr = 20;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : result.records) {
        if (!r.success) continue;
        const double p = record_predictor(r, result.predictor_name);
        if (p > 0.0 && r.sup_error > 0.0) pts.emplace_back(std::log10(p), std::log10(r.sup_error));
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!pts.empty()) {
        double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        const double padx = std::max(0.05, 0.05 * (x1 - x0)), pady = std::max(0.05, 0.05 * (y1 - y0));
        x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
        auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
        auto sy = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mb - mt); };
        os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
           << h - mb << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << ml << "\" y2=\"" << mt
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << (w / 2) << "\" y=\"" << h - 12
           << "\" text-anchor=\"middle\" font-size=\"12\">log10(" << result.predictor_name
           << ")</text>\n";
        os << "<text x=\"16\" y=\"" << (h / 2)
           << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << (h / 2)
           << ")\">log10(sup_error)</text>\n";
        for (const auto& [x, y] : pts)
            os << "<circle cx=\"" << format_double(sx(x)) << "\" cy=\"" << format_double(sy(y))
               << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
        if (result.slope) {
            // least-squares line in log10 space through the point means
            double mx = 0, my = 0;
            for (const auto& [x, y] : pts) {
                mx += x;
                my += y;
            }
            mx /= static_cast<double>(pts.size());
            my /= static_cast<double>(pts.size());
            const double a = *result.slope;
            const double ya = my + a * (x0 - mx), yb = my + a * (x1 - mx);
            os << "<line x1=\"" << format_double(sx(x0)) << "\" y1=\"" << format_double(sy(ya))
               << "\" x2=\"" << format_double(sx(x1)) << "\" y2=\"" << format_double(sy(yb))
               << "\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
            os << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 14
               << "\" text-anchor=\"end\" font-size=\"12\">slope " << format_double(a)
               << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

// Write rates.csv, summary.json, and rates.svg under out_dir.
inline void emit_report(const RateExperimentResult& result, const std::string& out_dir) {
    if (result.records.empty()) throw ConfigError("no records to emit");
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/rates.csv", rates_to_csv(result.records));
    write_file(out_dir + "/summary.json", rates_summary_json(result).dump(2) + "\n");
    write_file(out_dir + "/rates.svg", rates_to_svg(result));
}

}  // namespace ordembed

#include "marketdef/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "marketdef/linalg.hpp"
#include "marketdef/report.hpp"
#include "marketdef/simulate.hpp"
#include "marketdef/svg.hpp"
#include "marketdef/version.hpp"

namespace marketdef {

namespace {

using detail::json;

[[noreturn]] void bad_config(const std::string& origin, const std::string& what) {
    throw SchemaError(origin + ": " + what);
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& origin, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) bad_config(origin, "unknown key \"" + key + "\" in " + where);
    }
}

FeatureKind parse_kind(const std::string& s, const std::string& origin) {
    if (s == "numeric") return FeatureKind::numeric;
    if (s == "binary") return FeatureKind::binary;
    bad_config(origin, "feature kind must be numeric or binary, got \"" + s + "\"");
}

FeatureTransform parse_transform(const std::string& s, const std::string& origin) {
    if (s == "zscore") return FeatureTransform::zscore;
    if (s == "none") return FeatureTransform::none;
    bad_config(origin, "feature transform must be zscore or none, got \"" + s + "\"");
}

GapReference parse_reference(const std::string& s, const std::string& origin) {
    if (s == "uniform") return GapReference::uniform_box;
    if (s == "pca") return GapReference::pca_box;
    bad_config(origin, "reference must be uniform or pca, got \"" + s + "\"");
}

Seeding parse_seeding(const std::string& s, const std::string& origin) {
    if (s == "kmeanspp") return Seeding::kmeanspp;
    if (s == "uniform_rows") return Seeding::uniform_rows;
    bad_config(origin, "seeding must be kmeanspp or uniform_rows, got \"" + s + "\"");
}

SsnipVariant parse_variant(const std::string& s, const std::string& origin) {
    if (s == "all_products") return SsnipVariant::all_products;
    if (s == "subset") return SsnipVariant::subset;
    if (s == "single") return SsnipVariant::single;
    bad_config(origin, "scenario variant must be all_products, subset or single");
}

std::string variant_name(SsnipVariant v) {
    switch (v) {
        case SsnipVariant::all_products: return "all_products";
        case SsnipVariant::subset: return "subset";
        case SsnipVariant::single: return "single";
    }
    return "?";
}

ClusterConfig parse_cluster_section(const json& j, const std::string& origin) {
    require_keys(j,
                 {"data_csv", "id_column", "features", "k", "k_max", "restarts", "B",
                  "reference", "seeding", "anchor", "elbow_threshold", "max_candidates"},
                 origin, "cluster section");
    ClusterConfig c;
    if (!j.contains("data_csv")) bad_config(origin, "cluster section needs data_csv");
    c.data_csv = j.at("data_csv").get<std::string>();
    if (j.contains("id_column")) c.id_column = j.at("id_column").get<std::string>();
    if (!j.contains("features") || !j.at("features").is_array() || j.at("features").empty())
        bad_config(origin, "cluster section needs a non-empty features array");
    for (const auto& f : j.at("features")) {
        require_keys(f, {"name", "kind", "transform"}, origin, "feature spec");
        FeatureSpec spec;
        spec.name = f.at("name").get<std::string>();
        if (f.contains("kind")) spec.kind = parse_kind(f.at("kind").get<std::string>(), origin);
        if (f.contains("transform"))
            spec.transform = parse_transform(f.at("transform").get<std::string>(), origin);
        c.features.push_back(std::move(spec));
    }
    if (j.contains("k") && !j.at("k").is_null()) c.k = j.at("k").get<std::size_t>();
    if (j.contains("k_max")) c.k_max = j.at("k_max").get<std::size_t>();
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
    if (j.contains("B")) c.B = j.at("B").get<int>();
    if (j.contains("reference"))
        c.reference = parse_reference(j.at("reference").get<std::string>(), origin);
    if (j.contains("seeding")) c.seeding = parse_seeding(j.at("seeding").get<std::string>(), origin);
    if (j.contains("anchor") && !j.at("anchor").is_null())
        c.anchor = j.at("anchor").get<std::string>();
    if (j.contains("elbow_threshold")) c.elbow_threshold = j.at("elbow_threshold").get<double>();
    if (j.contains("max_candidates")) c.max_candidates = j.at("max_candidates").get<std::size_t>();
    return c;
}

ClaConfig parse_cla_section(const json& j, const std::string& origin) {
    require_keys(j, {"economics", "scenario", "avc_method", "avc_pool", "avc_quantities",
                     "actual_loss"},
                 origin, "cla section");
    ClaConfig c;
    if (!j.contains("economics")) bad_config(origin, "cla section needs economics");
    {
        const json& e = j.at("economics");
        require_keys(e, {"p0", "avc0", "q0", "fixed_cost"}, origin, "economics");
        c.economics.p0 = e.at("p0").get<double>();
        c.economics.avc0 = e.at("avc0").get<double>();
        if (e.contains("q0")) c.economics.q0 = e.at("q0").get<double>();
        else c.economics.q0 = 1.0;
        if (e.contains("fixed_cost")) c.economics.fixed_cost = e.at("fixed_cost").get<double>();
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        require_keys(s, {"variant", "y", "indices"}, origin, "scenario");
        if (s.contains("variant"))
            c.scenario.variant = parse_variant(s.at("variant").get<std::string>(), origin);
        if (s.contains("y")) c.scenario.y = s.at("y").get<double>();
        if (s.contains("indices"))
            c.scenario.product_indices = s.at("indices").get<std::vector<std::size_t>>();
    }
    if (c.scenario.product_indices.empty() && c.scenario.variant == SsnipVariant::single)
        c.scenario.product_indices = {0};
    if (j.contains("avc_method") && !j.at("avc_method").is_null()) {
        c.avc_method = j.at("avc_method").get<std::string>();
        if (*c.avc_method != "simple" && *c.avc_method != "weighted")
            bad_config(origin, "avc_method must be simple or weighted");
        if (!j.contains("avc_pool")) bad_config(origin, "avc_method needs avc_pool");
    }
    if (j.contains("avc_pool")) c.avc_pool = j.at("avc_pool").get<std::vector<double>>();
    if (j.contains("avc_quantities"))
        c.avc_quantities = j.at("avc_quantities").get<std::vector<double>>();
    if (!j.contains("actual_loss") || !j.at("actual_loss").is_array() ||
        j.at("actual_loss").empty())
        bad_config(origin, "cla section needs a non-empty actual_loss array");
    for (const auto& a : j.at("actual_loss")) {
        AlRequest req;
        if (!a.contains("basis")) bad_config(origin, "actual_loss entry needs a basis");
        req.basis = a.at("basis").get<std::string>();
        for (const auto& [key, value] : a.items()) {
            if (key == "basis") continue;
            if (!value.is_number())
                bad_config(origin, "actual_loss parameter \"" + key + "\" must be numeric");
            req.params[key] = value.get<double>();
        }
        c.actual_loss.push_back(std::move(req));
    }
    return c;
}

ScreenConfig parse_screen_section(const json& j, const std::string& origin) {
    require_keys(j, {"shares_csv", "merging"}, origin, "screen section");
    ScreenConfig c;
    if (!j.contains("shares_csv")) bad_config(origin, "screen section needs shares_csv");
    c.shares_csv = j.at("shares_csv").get<std::string>();
    if (!j.contains("merging") || !j.at("merging").is_array() || j.at("merging").empty())
        bad_config(origin, "screen section needs a non-empty merging array");
    c.merging = j.at("merging").get<std::vector<std::string>>();
    return c;
}

} // namespace

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        bad_config(origin, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) bad_config(origin, "config root must be an object");
    require_keys(j,
                 {"pipeline", "seed", "out", "emit_svg", "drop_constant", "threads", "cluster",
                  "cla", "screen"},
                 origin, "config");

    RunConfig cfg;
    try {
        if (!j.contains("pipeline")) bad_config(origin, "config needs a pipeline");
        cfg.pipeline = j.at("pipeline").get<std::string>();
        if (cfg.pipeline != "cluster" && cfg.pipeline != "cla" && cfg.pipeline != "screen" &&
            cfg.pipeline != "simulate-wholesalers")
            bad_config(origin, "pipeline must be cluster, cla, screen or simulate-wholesalers");
        if (j.contains("seed")) {
            cfg.seed = j.at("seed").get<std::uint64_t>();
            cfg.seed_explicit = true;
        }
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
        if (j.contains("emit_svg")) cfg.emit_svg = j.at("emit_svg").get<bool>();
        if (j.contains("drop_constant")) cfg.drop_constant = j.at("drop_constant").get<bool>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (cfg.pipeline == "cluster") {
            if (!j.contains("cluster")) bad_config(origin, "cluster pipeline needs a cluster section");
            cfg.cluster = parse_cluster_section(j.at("cluster"), origin);
        }
        if (cfg.pipeline == "cla") {
            if (!j.contains("cla")) bad_config(origin, "cla pipeline needs a cla section");
            cfg.cla = parse_cla_section(j.at("cla"), origin);
        }
        if (cfg.pipeline == "screen") {
            if (!j.contains("screen")) bad_config(origin, "screen pipeline needs a screen section");
            cfg.screen = parse_screen_section(j.at("screen"), origin);
        }
    } catch (const json::exception& e) {
        bad_config(origin, std::string("bad field type: ") + e.what());
    }
    if (cfg.threads < 1) bad_config(origin, "threads must be at least 1");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

void apply_overrides(RunConfig& cfg, const ConfigOverrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.k) cfg.cluster.k = *o.k;
    if (o.k_max) cfg.cluster.k_max = *o.k_max;
    if (o.restarts) cfg.cluster.restarts = *o.restarts;
    if (o.B) cfg.cluster.B = *o.B;
    if (o.reference) cfg.cluster.reference = parse_reference(*o.reference, "--reference");
    if (o.anchor) cfg.cluster.anchor = *o.anchor;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.emit_svg) cfg.emit_svg = *o.emit_svg;
    if (o.drop_constant) cfg.drop_constant = *o.drop_constant;
    if (o.threads) cfg.threads = *o.threads;
}

namespace {

json features_to_json(const std::vector<FeatureSpec>& specs) {
    json arr = json::array();
    for (const auto& s : specs) {
        arr.push_back(json{
            {"kind", s.kind == FeatureKind::binary ? "binary" : "numeric"},
            {"name", s.name},
            {"transform", s.transform == FeatureTransform::zscore ? "zscore" : "none"},
        });
    }
    return arr;
}

json echo_json(const RunConfig& cfg) {
    json j{
        {"drop_constant", cfg.drop_constant},
        {"emit_svg", cfg.emit_svg},
        {"out", cfg.out_dir.generic_string()},
        {"pipeline", cfg.pipeline},
        {"seed", cfg.seed},
    };
    if (cfg.pipeline == "cluster") {
        const ClusterConfig& c = cfg.cluster;
        json k = c.k ? json(*c.k) : json(nullptr);
        json anchor = c.anchor ? json(*c.anchor) : json(nullptr);
        j["cluster"] = json{
            {"B", c.B},
            {"anchor", std::move(anchor)},
            {"data_csv", c.data_csv.generic_string()},
            {"elbow_threshold", c.elbow_threshold},
            {"features", features_to_json(c.features)},
            {"id_column", c.id_column},
            {"k", std::move(k)},
            {"k_max", c.k_max},
            {"max_candidates", c.max_candidates},
            {"reference", c.reference == GapReference::pca_box ? "pca" : "uniform"},
            {"restarts", c.restarts},
            {"seeding", c.seeding == Seeding::kmeanspp ? "kmeanspp" : "uniform_rows"},
        };
    } else if (cfg.pipeline == "cla") {
        const ClaConfig& c = cfg.cla;
        json reqs = json::array();
        for (const auto& r : c.actual_loss) {
            json e{{"basis", r.basis}};
            for (const auto& [key, value] : r.params) e[key] = value;
            reqs.push_back(std::move(e));
        }
        j["cla"] = json{
            {"actual_loss", std::move(reqs)},
            {"avc_method", c.avc_method ? json(*c.avc_method) : json(nullptr)},
            {"avc_pool", c.avc_pool},
            {"avc_quantities", c.avc_quantities},
            {"economics",
             json{{"avc0", c.economics.avc0},
                  {"fixed_cost", c.economics.fixed_cost},
                  {"p0", c.economics.p0},
                  {"q0", c.economics.q0}}},
            {"scenario",
             json{{"indices", c.scenario.product_indices},
                  {"variant", variant_name(c.scenario.variant)},
                  {"y", c.scenario.y}}},
        };
    } else if (cfg.pipeline == "screen") {
        j["screen"] = json{
            {"merging", cfg.screen.merging},
            {"shares_csv", cfg.screen.shares_csv.generic_string()},
        };
    }
    return j;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hex(buf.str());
}

json provenance_json(const RunConfig& cfg, const std::vector<std::filesystem::path>& inputs) {
    json files = json::object();
    for (const auto& p : inputs) files[p.generic_string()] = file_digest(p);
    return json{
        {"inputs", std::move(files)},
        {"seed", cfg.seed},
        {"tool_version", kVersion},
    };
}

} // namespace

std::string config_echo(const RunConfig& cfg) { return detail::dump(echo_json(cfg)); }

AnalysisReport run_cluster_pipeline(const RunConfig& cfg) {
    const ClusterConfig& cc = cfg.cluster;
    ProductFeatureMatrix raw = load_csv(cc.data_csv, cc.features, cc.id_column);

    std::vector<std::string> dropped;
    if (cfg.drop_constant) {
        dropped = constant_zscore_columns(raw);
        if (!dropped.empty()) raw = drop_columns(raw, dropped);
    }
    const ProductFeatureMatrix data = standardize(raw);

    std::optional<std::size_t> anchor_row;
    if (cc.anchor) {
        for (std::size_t r = 0; r < data.n(); ++r)
            if (data.product_ids[r] == *cc.anchor) anchor_row = r;
        if (!anchor_row) throw SchemaError("anchor product \"" + *cc.anchor + "\" not in data");
    }

    const RngSeed root{cfg.seed, 0};

    const Dendrogram dend = hclust_complete(data.values);
    const std::vector<int> candidates = candidate_k(dend, cc.max_candidates);

    const std::size_t k_max = std::min(cc.k_max, data.n() - 1);
    const KSelectionReport ksel =
        gap_statistic(data.values, k_max, cc.B, cc.restarts, root.child(1), cc.reference,
                      cfg.threads, cc.elbow_threshold, Seeding::uniform_rows);

    std::size_t k = cc.k ? *cc.k : static_cast<std::size_t>(ksel.selected_k_gap);
    if (k < 1 || k > data.n())
        throw DomainError("cluster: k=" + std::to_string(k) + " out of range for n=" +
                          std::to_string(data.n()));
    const ClusterAssignment final_run = kmeans_restarts(
        data.values, k, cc.restarts, root.child(2), anchor_row, cc.seeding, cfg.threads);

    // One-feature data has no second component; project onto (x, 0).
    PcaProjection pca;
    if (data.d() >= 2) {
        pca = pca2(data);
    } else {
        const std::vector<double> mu = column_means(data.values);
        pca.components = Matrix(1, 2, 0.0);
        pca.components(0, 0) = 1.0;
        pca.scores = Matrix(data.n(), 2, 0.0);
        for (std::size_t r = 0; r < data.n(); ++r) pca.scores(r, 0) = data.values(r, 0) - mu[0];
        pca.variance_explained = {1.0, 0.0};
    }

    json merges = json::array();
    for (const auto& m : dend.merges)
        merges.push_back(json{{"height", m.height}, {"left", m.left}, {"right", m.right}});

    json scores = json::array();
    for (std::size_t r = 0; r < pca.scores.rows(); ++r)
        scores.push_back(std::vector<double>{pca.scores(r, 0), pca.scores(r, 1)});

    json report{
        {"clustering", detail::cluster_to_json(final_run)},
        {"config", echo_json(cfg)},
        {"dendrogram", json{{"candidate_k", candidates}, {"merges", std::move(merges)}}},
        {"dropped_columns", dropped},
        {"kselection", detail::kselection_to_json(ksel)},
        {"pca",
         json{{"scores", std::move(scores)},
              {"variance_explained",
               std::vector<double>{pca.variance_explained[0], pca.variance_explained[1]}}}},
        {"provenance", provenance_json(cfg, {cc.data_csv})},
    };

    AnalysisReport out;
    out.files["report.json"] = detail::dump(report);

    CsvTable labels;
    labels.header = {"product_id", "cluster"};
    for (std::size_t r = 0; r < data.n(); ++r)
        labels.rows.push_back({data.product_ids[r], std::to_string(final_run.labels[r])});
    out.files["labels.csv"] = write_csv(labels);

    CsvTable ks;
    ks.header = {"k", "wk", "log_wk", "e_log_wk", "gap", "se"};
    for (std::size_t i = 0; i < ksel.k_range.size(); ++i)
        ks.rows.push_back({std::to_string(ksel.k_range[i]), format_double(ksel.wk[i]),
                           format_double(ksel.log_wk[i]), format_double(ksel.e_log_wk[i]),
                           format_double(ksel.gap[i]), format_double(ksel.se[i])});
    out.files["kselect.csv"] = write_csv(ks);

    if (cfg.emit_svg)
        out.files["clusters.svg"] =
            render_cluster_svg(pca.scores, final_run.labels, pca.variance_explained);
    return out;
}

namespace {

double request_param(const AlRequest& r, const std::string& key) {
    const auto it = r.params.find(key);
    if (it == r.params.end())
        throw SchemaError("actual_loss basis \"" + r.basis + "\" needs parameter \"" + key + "\"");
    return it->second;
}

} // namespace

AnalysisReport run_cla(const RunConfig& cfg) {
    const ClaConfig& c = cfg.cla;
    c.economics.validate();
    std::size_t n_products = 1;
    for (std::size_t i : c.scenario.product_indices) n_products = std::max(n_products, i + 1);
    c.scenario.validate(n_products);
    const double y = c.scenario.y;

    double avc_effective = c.economics.avc0;
    if (c.avc_method) {
        if (*c.avc_method == "simple") {
            avc_effective = hm_avc_simple(c.avc_pool);
        } else {
            if (c.avc_quantities.size() != c.avc_pool.size())
                throw SchemaError("cla: avc_quantities must pair with avc_pool");
            std::vector<std::pair<double, double>> pairs;
            for (std::size_t i = 0; i < c.avc_pool.size(); ++i)
                pairs.emplace_back(c.avc_pool[i], c.avc_quantities[i]);
            avc_effective = hm_avc_weighted(pairs);
        }
    }

    const double cm = contribution_margin(c.economics.p0, avc_effective);
    const double cl_pct = critical_loss(y, cm);

    json verdicts = json::array();
    for (const auto& req : c.actual_loss) {
        double al_pct = 0.0;
        AlMethod method = AlMethod::demand;
        std::string basis = req.basis;
        if (req.basis == "supplied") {
            method = AlMethod::demand;
            al_pct = request_param(req, "al_pct");
        } else if (req.basis == "demand") {
            method = AlMethod::demand;
            const double da0 = request_param(req, "da_p0");
            const double units =
                actual_loss_demand(da0, request_param(req, "da_p1"), request_param(req, "db_p0"),
                                   request_param(req, "db_p1"));
            if (!(da0 > 0.0)) throw DomainError("cla: demand basis needs da_p0 > 0");
            al_pct = 100.0 * units / da0;
        } else if (req.basis == "elasticity") {
            method = AlMethod::elasticity;
            const double qa = request_param(req, "q_a");
            const double units =
                actual_loss_elasticities(y, request_param(req, "e_aa"), qa,
                                         request_param(req, "e_ba"), request_param(req, "q_b"));
            al_pct = 100.0 * units / qa;
        } else if (req.basis == "adr") {
            method = AlMethod::adr;
            al_pct = 100.0 * actual_loss_adr(y, request_param(req, "m"), request_param(req, "d"));
        } else if (req.basis == "obrien") {
            method = AlMethod::obrien;
            al_pct = 100.0 * actual_loss_obrien(y, cm, request_param(req, "e_aa"));
        } else {
            throw SchemaError("cla: unknown actual_loss basis \"" + req.basis + "\"");
        }
        const ClaVerdict v = ssnip_verdict({cl_pct, LossUnit::percent}, {al_pct, LossUnit::percent},
                                           method, c.scenario);
        json vj = detail::verdict_to_json(v);
        vj["al_basis"] = basis;
        verdicts.push_back(std::move(vj));
    }

    json report{
        {"cla",
         json{{"avc0_effective", avc_effective},
              {"contribution_margin", cm},
              {"critical_loss_pct", cl_pct},
              {"scenario",
               json{{"indices", c.scenario.product_indices},
                    {"variant", variant_name(c.scenario.variant)},
                    {"y", c.scenario.y}}},
              {"verdicts", std::move(verdicts)}}},
        {"config", echo_json(cfg)},
        {"provenance", provenance_json(cfg, {})},
    };

    AnalysisReport out;
    out.files["report.json"] = detail::dump(report);
    return out;
}

AnalysisReport run_screen(const RunConfig& cfg) {
    const CsvTable table = read_csv(cfg.screen.shares_csv);
    const std::size_t label_col = table.column("label");
    const std::size_t share_col = table.column("share_pct");

    MarketShares shares;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        shares.labels.push_back(table.rows[r][label_col]);
        shares.shares_pct.push_back(parse_cell(table.rows[r][share_col], r + 2, "share_pct"));
    }

    const std::set<std::string> merging(cfg.screen.merging.begin(), cfg.screen.merging.end());
    const ScreeningReport sr = screen(shares, merging);

    json report{
        {"config", echo_json(cfg)},
        {"provenance", provenance_json(cfg, {cfg.screen.shares_csv})},
        {"screening", detail::screening_to_json(sr)},
    };

    AnalysisReport out;
    out.files["report.json"] = detail::dump(report);
    return out;
}

AnalysisReport run_simulate_wholesalers(const RunConfig& cfg) {
    const CsvTable t = simulate_wholesalers(RngSeed{cfg.seed, 0});
    json report{
        {"config", echo_json(cfg)},
        {"provenance", provenance_json(cfg, {})},
        {"simulated", json{{"columns", t.header}, {"rows", t.rows.size()}}},
    };
    AnalysisReport out;
    out.files["report.json"] = detail::dump(report);
    out.files["wholesalers.csv"] = write_csv(t);
    return out;
}

AnalysisReport run(const RunConfig& cfg) {
    if (cfg.pipeline == "cluster") return run_cluster_pipeline(cfg);
    if (cfg.pipeline == "cla") return run_cla(cfg);
    if (cfg.pipeline == "screen") return run_screen(cfg);
    if (cfg.pipeline == "simulate-wholesalers") return run_simulate_wholesalers(cfg);
    throw SchemaError("unknown pipeline \"" + cfg.pipeline + "\"");
}

void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path staging = out_dir.string() + ".staging";

    fs::remove_all(staging, ec); // stale staging from a crashed run
    if (!fs::create_directories(staging))
        throw IoError("cannot create staging directory " + staging.string());
    try {
        for (const auto& [name, bytes] : report.files) {
            std::ofstream f(staging / name, std::ios::binary);
            if (!f) throw IoError("cannot open " + (staging / name).string() + " for writing");
            f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!f) throw IoError("write failed for " + (staging / name).string());
        }
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }

    // The swap happens only after every file landed.
    fs::remove_all(out_dir, ec);
    fs::rename(staging, out_dir, ec);
    if (ec) throw IoError("cannot move staged run into " + out_dir.string() + ": " + ec.message());
}

} // namespace marketdef

#include "qwalk/io.hpp"

#include "qwalk/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace qwalk {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InvalidArgument("cannot parse number '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InvalidArgument("cannot parse integer '" + s + "'");
    return v;
}

// Header line -> column index, checking that all required columns exist.
std::map<std::string, std::size_t> read_header(std::istream& is, std::initializer_list<const char*> required) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("csv: missing header");
    std::map<std::string, std::size_t> idx;
    const auto cols = split_csv_line(line);
    for (std::size_t i = 0; i < cols.size(); ++i) idx[cols[i]] = i;
    for (const char* name : required) {
        if (!idx.contains(name)) throw InvalidArgument(std::string("csv: missing column '") + name + "'");
    }
    return idx;
}

std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::get<std::string>(c);
}

const char* bounds_name(BoundsMode m) {
    return m == BoundsMode::PeriodicWrap ? "periodic-wrap" : "unconstrained";
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

json table_to_json(const Table& t) {
    json arr = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
        arr.push_back(std::move(obj));
    }
    return arr;
}

fs::path write_table(const fs::path& dir, const std::string& stem, const Table& t, TableFormat format) {
    fs::create_directories(dir);
    const fs::path path = dir / (stem + (format == TableFormat::Csv ? ".csv" : ".json"));
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    if (format == TableFormat::Csv) {
        write_csv(os, t);
    } else {
        os << table_to_json(t).dump(2) << '\n';
    }
    return path;
}

void write_json_file(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open " + path.string());
    return json::parse(is);
}

const char* spin_name(Spin s) { return s == Spin::L ? "L" : "R"; }

Spin parse_spin(const std::string& text) {
    if (text == "L") return Spin::L;
    if (text == "R") return Spin::R;
    throw InvalidArgument("unknown spin '" + text + "'");
}

Table state_table(const WalkState& s) {
    Table t{{"site", "spin", "re", "im", "density"}, {}};
    for (int j = -s.half_width(); j <= s.half_width(); ++j) {
        for (Spin sp : {Spin::L, Spin::R}) {
            const Complex a = s.amplitude(j, sp);
            t.rows.push_back({std::int64_t{j}, std::string(spin_name(sp)), a.real(), a.imag(), std::norm(a)});
        }
    }
    return t;
}

Table trajectory_table(const std::vector<WalkState>& trajectory) {
    Table t{{"step", "lambda", "site", "spin", "density"}, {}};
    for (std::size_t step = 0; step < trajectory.size(); ++step) {
        const WalkState& s = trajectory[step];
        for (int j = -s.half_width(); j <= s.half_width(); ++j) {
            for (Spin sp : {Spin::L, Spin::R}) {
                t.rows.push_back({static_cast<std::int64_t>(step), static_cast<std::int64_t>(s.lambda_index(j, sp)),
                                  std::int64_t{j}, std::string(spin_name(sp)), s.density(j, sp)});
            }
        }
    }
    return t;
}

Table schmidt_table(const std::vector<double>& schmidt_per_step) {
    Table t{{"step", "schmidt_norm"}, {}};
    for (std::size_t i = 0; i < schmidt_per_step.size(); ++i) {
        t.rows.push_back({static_cast<std::int64_t>(i), schmidt_per_step[i]});
    }
    return t;
}

Table site_population_table(const WalkState& s) {
    Table t{{"site", "density", "density_l", "density_r"}, {}};
    for (int j = -s.half_width(); j <= s.half_width(); ++j) {
        t.rows.push_back({std::int64_t{j}, s.site_population(j), s.density(j, Spin::L), s.density(j, Spin::R)});
    }
    return t;
}

Table hop_trace_table(const OptResult& r) {
    Table t{{"hop", "proposed_cost", "accepted", "best_so_far"}, {}};
    for (std::size_t i = 0; i < r.hop_trace.size(); ++i) {
        const auto& h = r.hop_trace[i];
        t.rows.push_back({static_cast<std::int64_t>(i + 1), h.proposed_cost, std::int64_t{h.accepted ? 1 : 0},
                          h.best_so_far});
    }
    return t;
}

Table measurement_table(const MeasurementRecord& mr) {
    Table t{{"site", "I_L", "I_R", "I_D", "I_C"}, {}};
    for (const auto& m : mr.sites) t.rows.push_back({std::int64_t{m.site}, m.i_l, m.i_r, m.i_d, m.i_c});
    return t;
}

Table mean_schmidt_table(const BatchStats& st) {
    Table t{{"step", "mean_schmidt"}, {}};
    for (std::size_t i = 0; i < st.mean_schmidt_per_step.size(); ++i) {
        t.rows.push_back({static_cast<std::int64_t>(i), st.mean_schmidt_per_step[i]});
    }
    return t;
}

Table mean_density_table(const BatchStats& st) {
    Table t{{"site", "spin", "density"}, {}};
    for (std::size_t i = 0; i < st.mean_final_density_l.size(); ++i) {
        const auto site = static_cast<std::int64_t>(i) - st.n_steps;
        t.rows.push_back({site, std::string("L"), st.mean_final_density_l[i]});
        t.rows.push_back({site, std::string("R"), st.mean_final_density_r[i]});
    }
    return t;
}

void write_state_csv(std::ostream& os, const WalkState& s) { write_csv(os, state_table(s)); }

WalkState read_state_csv(std::istream& is) {
    auto idx = read_header(is, {"site", "spin", "re", "im"});
    struct Row {
        int site;
        Spin spin;
        Complex value;
    };
    std::vector<Row> rows;
    int half_width = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() < idx.size()) throw InvalidArgument("csv: short row '" + line + "'");
        Row r{parse_int(f[idx["site"]]), parse_spin(f[idx["spin"]]),
              {parse_double(f[idx["re"]]), parse_double(f[idx["im"]])}};
        half_width = std::max(half_width, std::abs(r.site));
        rows.push_back(r);
    }
    WalkState s(half_width);
    for (const auto& r : rows) s.set_amplitude(r.site, r.spin, r.value);
    return s;
}

void write_measurement_csv(std::ostream& os, const MeasurementRecord& mr) { write_csv(os, measurement_table(mr)); }

MeasurementRecord read_measurement_csv(std::istream& is, std::optional<std::int64_t> n_shots) {
    auto idx = read_header(is, {"site", "I_L", "I_R", "I_D", "I_C"});
    MeasurementRecord mr;
    mr.n_shots = n_shots;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() < idx.size()) throw InvalidArgument("csv: short row '" + line + "'");
        SiteIntensities m{parse_int(f[idx["site"]]), parse_double(f[idx["I_L"]]), parse_double(f[idx["I_R"]]),
                          parse_double(f[idx["I_D"]]), parse_double(f[idx["I_C"]])};
        mr.half_width = std::max(mr.half_width, std::abs(m.site));
        mr.sites.push_back(m);
    }
    return mr;
}

json to_json(const NVector& n) { return json::array({n.x, n.y, n.z}); }

json to_json(const SchmidtReport& r) {
    return {{"schmidt_norm", r.schmidt_norm}, {"lambda_plus", r.lambda_plus}, {"lambda_minus", r.lambda_minus},
            {"e_plus", r.e_plus},             {"e_minus", r.e_minus},         {"n", to_json(r.n)}};
}

json to_json(const BlochAngles& b) { return {{"theta", b.theta}, {"phi", b.phi}}; }

BlochAngles bloch_from_json(const json& j) { return {j.at("theta").get<double>(), j.at("phi").get<double>()}; }

json to_json(const CoinSchedule& sched) {
    json arr = json::array();
    for (const auto& c : sched.steps()) arr.push_back({{"xi", c.xi}, {"zeta", c.zeta}, {"theta", c.theta}});
    return arr;
}

CoinSchedule schedule_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("schedule: expected a JSON array of {xi, zeta, theta}");
    std::vector<CoinParams> steps;
    for (const auto& e : j) {
        steps.push_back({e.at("xi").get<double>(), e.at("zeta").get<double>(), e.at("theta").get<double>()});
    }
    return CoinSchedule(std::move(steps));
}

json to_json(const OptimizerConfig& cfg) {
    return {{"n_hops", cfg.n_hops},
            {"step_size", cfg.step_size},
            {"temperature", cfg.temperature},
            {"local_max_iters", cfg.local_max_iters},
            {"local_tolerance", cfg.local_tolerance},
            {"fd_step", cfg.fd_step},
            {"rng_seed", cfg.rng_seed},
            {"bounds_mode", bounds_name(cfg.bounds_mode)}};
}

json to_json(const OptResult& r) {
    json trace = json::array();
    for (const auto& h : r.hop_trace) {
        trace.push_back({{"proposed_cost", h.proposed_cost}, {"accepted", h.accepted}, {"best_so_far", h.best_so_far}});
    }
    return {{"best_w", r.best_w},
            {"best_cost", r.best_cost},
            {"initial_local_cost", r.initial_local_cost},
            {"n_cost_evals", r.n_cost_evals},
            {"hop_trace", std::move(trace)}};
}

OptResult opt_result_from_json(const json& j) {
    OptResult r;
    r.best_w = j.at("best_w").get<std::vector<double>>();
    r.best_cost = j.at("best_cost").get<double>();
    r.initial_local_cost = j.at("initial_local_cost").get<double>();
    r.n_cost_evals = j.at("n_cost_evals").get<std::int64_t>();
    for (const auto& h : j.at("hop_trace")) {
        r.hop_trace.push_back(
            {h.at("proposed_cost").get<double>(), h.at("accepted").get<bool>(), h.at("best_so_far").get<double>()});
    }
    return r;
}

json to_json(const ExperimentConfig& cfg) {
    return {{"n_steps", cfg.n_steps},
            {"n_samples", cfg.n_samples},
            {"selection_threshold", cfg.selection_threshold},
            {"beta", cfg.beta},
            {"rng_seed", cfg.rng_seed},
            {"haar_uniform", cfg.haar_uniform},
            {"output_dir", cfg.output_dir.string()}};
}

json to_json(const RunRecord& r) {
    return {{"index", r.index},
            {"seed", r.seed},
            {"initial", to_json(r.initial)},
            {"ok", r.ok},
            {"error", r.error},
            {"best_w", r.best_w},
            {"best_cost", r.best_cost},
            {"final_schmidt", r.final_schmidt},
            {"final_participation", r.final_participation},
            {"schmidt_per_step", r.schmidt_per_step},
            {"final_density_l", r.final_density_l},
            {"final_density_r", r.final_density_r},
            {"selected", r.selected},
            {"n_cost_evals", r.n_cost_evals}};
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.index = j.at("index").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.initial = bloch_from_json(j.at("initial"));
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.best_w = j.at("best_w").get<std::vector<double>>();
    r.best_cost = j.at("best_cost").get<double>();
    r.final_schmidt = j.at("final_schmidt").get<double>();
    r.final_participation = j.at("final_participation").get<double>();
    r.schmidt_per_step = j.at("schmidt_per_step").get<std::vector<double>>();
    r.final_density_l = j.at("final_density_l").get<std::vector<double>>();
    r.final_density_r = j.at("final_density_r").get<std::vector<double>>();
    r.selected = j.at("selected").get<bool>();
    r.n_cost_evals = j.at("n_cost_evals").get<std::int64_t>();
    return r;
}

json to_json(const BatchStats& st) {
    return {{"n_steps", st.n_steps},
            {"n_total", st.n_total},
            {"n_selected", st.n_selected},
            {"n_failed", st.n_failed},
            {"selected_fraction", st.n_total ? static_cast<double>(st.n_selected) / static_cast<double>(st.n_total) : 0.0},
            {"averages_defined", st.averages_defined},
            {"mean_schmidt_per_step", st.mean_schmidt_per_step},
            {"mean_final_density_l", st.mean_final_density_l},
            {"mean_final_density_r", st.mean_final_density_r},
            {"per_run_final_schmidt", st.per_run_final_schmidt}};
}

json to_json(const MeasurementRecord& mr) {
    json sites = json::array();
    for (const auto& m : mr.sites) {
        sites.push_back({{"site", m.site}, {"I_L", m.i_l}, {"I_R", m.i_r}, {"I_D", m.i_d}, {"I_C", m.i_c}});
    }
    return {{"half_width", mr.half_width},
            {"n_shots", mr.n_shots ? json(*mr.n_shots) : json(nullptr)},
            {"sites", std::move(sites)}};
}

MeasurementRecord measurement_from_json(const json& j) {
    MeasurementRecord mr;
    mr.half_width = j.at("half_width").get<int>();
    if (!j.at("n_shots").is_null()) mr.n_shots = j.at("n_shots").get<std::int64_t>();
    for (const auto& m : j.at("sites")) {
        mr.sites.push_back({m.at("site").get<int>(), m.at("I_L").get<double>(), m.at("I_R").get<double>(),
                            m.at("I_D").get<double>(), m.at("I_C").get<double>()});
    }
    return mr;
}

void write_runs_jsonl(std::ostream& os, const std::vector<RunRecord>& runs) {
    for (const auto& r : runs) os << to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_runs_jsonl(std::istream& is) {
    std::vector<RunRecord> runs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        runs.push_back(run_record_from_json(json::parse(line)));
    }
    return runs;
}

json make_manifest(const std::string& command, const json& config) {
    return {{"program", "qwalk"}, {"version", kVersion}, {"command", command}, {"config", config}};
}

void write_batch_outputs(const fs::path& dir, const ExperimentConfig& cfg, const OptimizerConfig& opt_cfg,
                         const BatchResult& result) {
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json",
                    make_manifest("batch", {{"experiment", to_json(cfg)}, {"optimizer", to_json(opt_cfg)}}));
    {
        std::ofstream os(dir / "runs.jsonl");
        if (!os) throw std::runtime_error("cannot write " + (dir / "runs.jsonl").string());
        write_runs_jsonl(os, result.runs);
    }
    write_json_file(dir / "batch_stats.json", to_json(result.stats));
    write_table(dir, "mean_schmidt", mean_schmidt_table(result.stats), TableFormat::Csv);
    write_table(dir, "mean_density", mean_density_table(result.stats), TableFormat::Csv);
}

}  // namespace qwalk

#include "gtc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gtc {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

// Strips a trailing `#` comment and returns false for blank lines.
bool payload_line(std::string& line) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    return line.find_first_not_of(" \t\r\n") != std::string::npos;
}

[[noreturn]] void bad_line(const std::string& path, Index lineno) {
    throw DataError(path + ":" + std::to_string(lineno) + ": malformed line");
}

}  // namespace

ObservedTensor read_coo_tensor(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    ObservedTensor obs;
    std::string line;
    Index lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        if (!have_header) {
            if (!(ss >> obs.n1 >> obs.n2 >> obs.n3)) bad_line(path, lineno);
            have_header = true;
            continue;
        }
        Observation o;
        if (!(ss >> o.i1 >> o.i2 >> o.i3 >> o.value)) bad_line(path, lineno);
        if (!std::isfinite(o.value)) bad_line(path, lineno);
        --o.i1;
        --o.i2;
        --o.i3;
        obs.entries.push_back(o);
    }
    if (!have_header) throw DataError(path + ": missing dims header");
    try {
        obs.validate();
    } catch (const std::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return obs;
}

void write_coo_tensor(const std::string& path, const ObservedTensor& obs) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out.precision(17);
    out << obs.n1 << ' ' << obs.n2 << ' ' << obs.n3 << '\n';
    for (const Observation& o : obs.entries)
        out << o.i1 + 1 << ' ' << o.i2 + 1 << ' ' << o.i3 + 1 << ' ' << o.value << '\n';
}

namespace {

DynamicGraph read_edges(const std::string& path, Index m, Index T, bool with_period) {
    std::ifstream in = open_or_throw(path);
    std::vector<EdgeEvent> events;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        Index i, j, t = 1;
        if (!(ss >> i >> j) || (with_period && !(ss >> t))) bad_line(path, lineno);
        if (with_period) {
            events.push_back({i - 1, j - 1, t - 1});
        } else {
            for (Index p = 0; p < T; ++p) events.push_back({i - 1, j - 1, p});
        }
    }
    try {
        return from_edge_events(events, m, T);
    } catch (const std::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace

DynamicGraph read_dynamic_graph(const std::string& path, Index m, Index T) {
    return read_edges(path, m, T, true);
}

DynamicGraph read_static_graph(const std::string& path, Index m, Index T) {
    return read_edges(path, m, T, false);
}

void write_dynamic_graph(const std::string& path, const DynamicGraph& g) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (Index t = 0; t < g.period_count; ++t)
        for (Index i = 0; i < g.vertex_count; ++i)
            for (Index j = i + 1; j < g.vertex_count; ++j)
                if (g.adjacency(i, j, t) != 0.0)
                    out << i + 1 << ' ' << j + 1 << ' ' << t + 1 << '\n';
}

std::vector<Rating> read_rating_log(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Rating> log;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        Rating r;
        if (!(ss >> r.user >> r.item >> r.value >> r.timestamp)) bad_line(path, lineno);
        log.push_back(r);
    }
    return log;
}

RatingIngest ingest_ratings(const std::vector<Rating>& log, Index T) {
    if (T <= 0) throw DataError("ingest_ratings: T must be positive");
    if (log.empty()) throw DataError("ingest_ratings: empty rating log");

    RatingIngest out;
    std::unordered_map<long long, Index> user_map, item_map;
    auto remap = [](std::unordered_map<long long, Index>& map,
                    std::vector<long long>& ids, long long id) {
        auto [it, inserted] = map.try_emplace(id, static_cast<Index>(ids.size()));
        if (inserted) ids.push_back(id);
        return it->second;
    };

    double ts_min = log.front().timestamp, ts_max = ts_min;
    for (const Rating& r : log) {
        ts_min = std::min(ts_min, r.timestamp);
        ts_max = std::max(ts_max, r.timestamp);
    }
    const double width = ts_max - ts_min;
    auto bucket = [&](double ts) {
        if (width == 0.0) return Index(0);
        const double pos = (ts - ts_min) / width * static_cast<double>(T);
        return std::min<Index>(static_cast<Index>(pos), T - 1);
    };

    // (user, item, period) -> (sum, count)
    std::map<std::tuple<Index, Index, Index>, std::pair<double, Index>> acc;
    for (const Rating& r : log) {
        const Index u = remap(user_map, out.user_ids, r.user);
        const Index v = remap(item_map, out.item_ids, r.item);
        auto& [sum, cnt] = acc[{u, v, bucket(r.timestamp)}];
        sum += r.value;
        ++cnt;
    }

    out.tensor.n1 = static_cast<Index>(out.user_ids.size());
    out.tensor.n2 = static_cast<Index>(out.item_ids.size());
    out.tensor.n3 = T;
    for (const auto& [key, sc] : acc) {
        const auto [u, v, p] = key;
        out.tensor.entries.push_back({u, v, p, sc.first / sc.second});
    }
    out.tensor.validate();
    out.sparsity = static_cast<double>(out.tensor.entries.size()) /
                   static_cast<double>(out.tensor.n1 * out.tensor.n2 * out.tensor.n3);
    return out;
}

ObservedTensor ingest_traffic(const std::string& path, Index segments, Index intervals,
                              Index days, bool zeros_are_values) {
    if (segments <= 0 || intervals <= 0 || days <= 0)
        throw DataError("ingest_traffic: dimensions must be positive");
    std::ifstream in = open_or_throw(path);
    ObservedTensor obs{segments, intervals, days, {}};
    const Index cols = intervals * days;
    double v;
    for (Index row = 0; row < segments; ++row)
        for (Index col = 0; col < cols; ++col) {
            if (!(in >> v))
                throw DataError(path + ": expected " +
                                std::to_string(segments * cols) + " values");
            if (v == 0.0 && !zeros_are_values) continue;
            obs.entries.push_back({row, col % intervals, col / intervals, v});
        }
    if (in >> v) throw DataError(path + ": trailing values beyond declared shape");
    if (!obs.entries.empty()) obs.validate();
    return obs;
}

EvalMetrics evaluate(const RTensor& completed, const std::vector<Observation>& test) {
    if (test.empty()) throw DataError("evaluate: empty test mask");
    double diff_sq = 0, truth_sq = 0;
    for (const Observation& o : test) {
        const double d = completed(o.i1, o.i2, o.i3) - o.value;
        diff_sq += d * d;
        truth_sq += o.value * o.value;
    }
    EvalMetrics m;
    m.re = truth_sq > 0 ? std::sqrt(diff_sq / truth_sq)
                        : (diff_sq > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    m.rmse = std::sqrt(diff_sq / static_cast<double>(test.size()));
    return m;
}

namespace {

Index to_index(const std::string& s) { return static_cast<Index>(std::stoll(s)); }

std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected boolean, got '" + s + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& s, F conv) {
    std::vector<T> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(conv(item.substr(a, item.find_last_not_of(" \t") - a + 1)));
    }
    if (out.empty()) throw ConfigError("empty list value '" + s + "'");
    return out;
}

template <typename T>
std::string list_text(const std::vector<T>& v) {
    std::ostringstream ss;
    ss.precision(17);
    for (size_t i = 0; i < v.size(); ++i) ss << (i ? "," : "") << v[i];
    return ss.str();
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "m") m = to_index(value);
        else if (key == "n") n = to_index(value);
        else if (key == "T") T = to_index(value);
        else if (key == "gen_rank") gen_rank = to_index(value);
        else if (key == "communities") communities = to_index(value);
        else if (key == "p_in") p_in = std::stod(value);
        else if (key == "p_out") p_out = std::stod(value);
        else if (key == "interval") interval = to_index(value);
        else if (key == "graph_seed") graph_seed = to_u64(value);
        else if (key == "data_seed") data_seed = to_u64(value);
        else if (key == "sample_ratio") sample_ratio = std::stod(value);
        else if (key == "sample_count") sample_count = to_index(value);
        else if (key == "sigma") sigma = std::stod(value);
        else if (key == "noise") {
            if (value == "gaussian") noise = NoiseKind::gaussian;
            else if (value == "none") noise = NoiseKind::none;
            else throw ConfigError("noise must be gaussian|none");
        }
        else if (key == "with_replacement") with_replacement = to_bool(value);
        else if (key == "sample_seed") sample_seed = to_u64(value);
        else if (key == "rank") solver.rank = to_index(value);
        else if (key == "lambda_g") solver.lambda_g = std::stod(value);
        else if (key == "lambda_1") solver.lambda_1 = std::stod(value);
        else if (key == "beta") solver.beta = std::stod(value);
        else if (key == "gamma") solver.gamma = std::stod(value);
        else if (key == "ss") solver.ss = to_index(value);
        else if (key == "transform") {
            if (value == "dft") solver.transform = SolverTransform::dft;
            else if (value == "identity") solver.transform = SolverTransform::identity;
            else throw ConfigError("transform must be dft|identity");
        }
        else if (key == "cg_tol") solver.cg_tol = std::stod(value);
        else if (key == "cg_max_iter") solver.cg_max_iter = to_index(value);
        else if (key == "cg_direct_threshold") solver.cg_direct_threshold = to_index(value);
        else if (key == "max_iter") solver.max_iter = to_index(value);
        else if (key == "stop_tol") solver.stop_tol = std::stod(value);
        else if (key == "solver_seed") solver.seed = to_u64(value);
        else if (key == "beta_theory") beta_theory = to_bool(value);
        else if (key == "ratios") ratios = to_list<double>(value, [](const std::string& s) { return std::stod(s); });
        else if (key == "intervals") intervals = to_list<Index>(value, to_index);
        else if (key == "ss_grid") ss_grid = to_list<Index>(value, to_index);
        else if (key == "ranks") ranks = to_list<Index>(value, to_index);
        else if (key == "perturb_levels") perturb_levels = to_list<double>(value, [](const std::string& s) { return std::stod(s); });
        else if (key == "seeds") seeds = to_index(value);
        else if (key == "folds") folds = to_index(value);
        else if (key == "data_file") data_file = value;
        else if (key == "graph_w_file") graph_w_file = value;
        else if (key == "graph_h_file") graph_h_file = value;
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for key '" + key + "': '" + value + "'");
    }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload_line(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    return parse(in);
}

void ExperimentConfig::validate() const {
    if (m <= 0 || n <= 0 || T <= 0) throw ConfigError("m, n, T must be positive");
    if (gen_rank <= 0 || gen_rank > std::min(m, n))
        throw ConfigError("gen_rank must be in [1, min(m, n)]");
    if (sample_count == 0 && (sample_ratio <= 0.0 || sample_ratio > 1.0))
        throw ConfigError("sample_ratio must be in (0, 1]");
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (seeds <= 0 || folds <= 1) throw ConfigError("seeds >= 1 and folds >= 2 required");
    try {
        solver.validate(T);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string ExperimentConfig::resolved_text() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << "m = " << m << "\nn = " << n << "\nT = " << T
       << "\ngen_rank = " << gen_rank << "\ncommunities = " << communities
       << "\np_in = " << p_in << "\np_out = " << p_out
       << "\ninterval = " << interval << "\ngraph_seed = " << graph_seed
       << "\ndata_seed = " << data_seed << "\nsample_ratio = " << sample_ratio
       << "\nsample_count = " << sample_count << "\nsigma = " << sigma
       << "\nnoise = " << (noise == NoiseKind::gaussian ? "gaussian" : "none")
       << "\nwith_replacement = " << (with_replacement ? "true" : "false")
       << "\nsample_seed = " << sample_seed << "\nrank = " << solver.rank
       << "\nlambda_g = " << solver.lambda_g << "\nlambda_1 = " << solver.lambda_1
       << "\nbeta = " << solver.beta << "\ngamma = " << solver.gamma
       << "\nss = " << solver.ss << "\ntransform = "
       << (solver.transform == SolverTransform::dft ? "dft" : "identity")
       << "\ncg_tol = " << solver.cg_tol << "\ncg_max_iter = " << solver.cg_max_iter
       << "\ncg_direct_threshold = " << solver.cg_direct_threshold
       << "\nmax_iter = " << solver.max_iter << "\nstop_tol = " << solver.stop_tol
       << "\nsolver_seed = " << solver.seed
       << "\nbeta_theory = " << (beta_theory ? "true" : "false")
       << "\nratios = " << list_text(ratios) << "\nintervals = " << list_text(intervals);
    if (!ss_grid.empty()) ss << "\nss_grid = " << list_text(ss_grid);
    ss << "\nranks = " << list_text(ranks)
       << "\nperturb_levels = " << list_text(perturb_levels)
       << "\nseeds = " << seeds << "\nfolds = " << folds;
    if (!data_file.empty()) ss << "\ndata_file = " << data_file;
    if (!graph_w_file.empty()) ss << "\ngraph_w_file = " << graph_w_file;
    if (!graph_h_file.empty()) ss << "\ngraph_h_file = " << graph_h_file;
    ss << '\n';
    return ss.str();
}

}  // namespace gtc

// File formats, dataset ingestion, evaluation metrics, and experiment
// configuration. Exceptions are checked by type because the CLI maps
// ConfigError -> exit 2 and DataError -> exit 3.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "gtc/io.hpp"

using namespace gtc;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("gtc_io_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string write(const std::string& name, const std::string& text) const {
        const std::string path = (dir / name).string();
        std::ofstream(path) << text;
        return path;
    }
};

}  // namespace

TEST_CASE("coo tensor: hand-written file with comments and 1-based indices") {
    TempDir tmp;
    const std::string path = tmp.write("a.coo",
                                       "# dims header first\n"
                                       "3 4 2\n"
                                       "\n"
                                       "1 1 1 2.5   # corner entry\n"
                                       "3 4 2 -1.0\n");
    ObservedTensor obs = read_coo_tensor(path);
    CHECK(obs.n1 == 3);
    CHECK(obs.n2 == 4);
    CHECK(obs.n3 == 2);
    REQUIRE(obs.entries.size() == 2);
    CHECK(obs.entries[0].i1 == 0);  // 1-based on disk, 0-based in memory
    CHECK(obs.entries[0].i2 == 0);
    CHECK(obs.entries[0].i3 == 0);
    CHECK(obs.entries[0].value == 2.5);
    CHECK(obs.entries[1].i1 == 2);
    CHECK(obs.entries[1].i2 == 3);
    CHECK(obs.entries[1].i3 == 1);
    CHECK(obs.entries[1].value == -1.0);
}

TEST_CASE("coo tensor: lossless round trip") {
    TempDir tmp;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> randn(0.0, 1.0);
    ObservedTensor obs{7, 6, 5, {}};
    std::set<std::tuple<Index, Index, Index>> used;
    while (obs.entries.size() < 40) {
        Observation o{static_cast<Index>(rng() % 7), static_cast<Index>(rng() % 6),
                      static_cast<Index>(rng() % 5), randn(rng)};
        if (used.insert({o.i1, o.i2, o.i3}).second) obs.entries.push_back(o);
    }
    const std::string path = (tmp.dir / "rt.coo").string();
    write_coo_tensor(path, obs);
    ObservedTensor back = read_coo_tensor(path);
    CHECK(back.n1 == obs.n1);
    CHECK(back.n2 == obs.n2);
    CHECK(back.n3 == obs.n3);
    REQUIRE(back.entries.size() == obs.entries.size());
    for (size_t k = 0; k < obs.entries.size(); ++k) {
        CHECK(back.entries[k].i1 == obs.entries[k].i1);
        CHECK(back.entries[k].i2 == obs.entries[k].i2);
        CHECK(back.entries[k].i3 == obs.entries[k].i3);
        CHECK(back.entries[k].value == obs.entries[k].value);  // 17 digits
    }
}

TEST_CASE("coo tensor: malformed input raises DataError with the line number") {
    TempDir tmp;
    CHECK_THROWS_AS(read_coo_tensor((tmp.dir / "missing.coo").string()), DataError);
    CHECK_THROWS_AS(read_coo_tensor(tmp.write("empty.coo", "# only comments\n")),
                    DataError);
    try {
        read_coo_tensor(tmp.write("bad.coo", "2 2 2\n1 1 1 ouch\n"));
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK_THROWS_AS(read_coo_tensor(tmp.write("nan.coo", "2 2 2\n1 1 1 nan\n")),
                    DataError);
    CHECK_THROWS_AS(read_coo_tensor(tmp.write("dup.coo", "2 2 2\n1 1 1 1\n1 1 1 2\n")),
                    DataError);
    CHECK_THROWS_AS(read_coo_tensor(tmp.write("range.coo", "2 2 2\n3 1 1 1\n")),
                    DataError);
}

TEST_CASE("graph files: dynamic round trip and static broadcast") {
    TempDir tmp;
    const std::string dyn = tmp.write("g.edges",
                                      "# i j t, 1-based\n"
                                      "1 2 1\n"
                                      "2 3 2\n");
    DynamicGraph g = read_dynamic_graph(dyn, 4, 3);
    CHECK(g.adjacency(0, 1, 0) == 1.0);
    CHECK(g.adjacency(1, 0, 0) == 1.0);
    CHECK(g.adjacency(1, 2, 1) == 1.0);
    CHECK(g.adjacency(0, 1, 1) == 0.0);

    const std::string out = (tmp.dir / "g2.edges").string();
    write_dynamic_graph(out, g);
    DynamicGraph back = read_dynamic_graph(out, 4, 3);
    for (Index i = 0; i < g.adjacency.size(); ++i)
        CHECK(back.adjacency.data()[i] == g.adjacency.data()[i]);

    const std::string stat = tmp.write("s.edges", "1 2\n3 4\n");
    DynamicGraph s = read_static_graph(stat, 4, 3);
    for (Index t = 0; t < 3; ++t) {
        CHECK(s.adjacency(0, 1, t) == 1.0);
        CHECK(s.adjacency(2, 3, t) == 1.0);
    }

    CHECK_THROWS_AS(read_dynamic_graph(tmp.write("b.edges", "1 2\n"), 4, 3), DataError);
    CHECK_THROWS_AS(read_dynamic_graph(tmp.write("l.edges", "1 1 1\n"), 4, 3),
                    DataError);  // self loop
    CHECK_THROWS_AS(read_dynamic_graph(tmp.write("r.edges", "1 5 1\n"), 4, 3),
                    DataError);  // vertex out of range
}

TEST_CASE("rating log: parsing and trivial ingestion cases") {
    TempDir tmp;
    const std::string path = tmp.write("r.log",
                                       "# user item rating timestamp\n"
                                       "42 7 3.5 100\n"
                                       "42 7 4.5 101\n"
                                       "9 7 2.0 900\n");
    std::vector<Rating> log = read_rating_log(path);
    REQUIRE(log.size() == 3);
    CHECK(log[0].user == 42);
    CHECK(log[0].item == 7);
    CHECK(log[0].value == 3.5);
    CHECK(log[0].timestamp == 100.0);
    CHECK_THROWS_AS(read_rating_log(tmp.write("bad.log", "42 7 3.5\n")), DataError);

    // Single rating: 1 x 1 x T with the one observation.
    RatingIngest one = ingest_ratings({{5, 6, 4.0, 0.0}}, 4);
    CHECK(one.tensor.n1 == 1);
    CHECK(one.tensor.n2 == 1);
    CHECK(one.tensor.n3 == 4);
    REQUIRE(one.tensor.entries.size() == 1);
    CHECK(one.tensor.entries[0].value == 4.0);
    CHECK(one.user_ids == std::vector<long long>{5});
    CHECK(one.item_ids == std::vector<long long>{6});

    // Two ratings by one user on one item in one period average.
    RatingIngest avg = ingest_ratings({{1, 2, 3.0, 10.0}, {1, 2, 4.0, 11.0}}, 1);
    REQUIRE(avg.tensor.entries.size() == 1);
    CHECK(avg.tensor.entries[0].value == 3.5);

    CHECK_THROWS_AS(ingest_ratings({}, 4), DataError);
    CHECK_THROWS_AS(ingest_ratings({{1, 2, 3.0, 0.0}}, 0), DataError);
}

TEST_CASE("ingest_ratings: equal-width buckets and dense id remapping") {
    // Oracle first: timestamps span [0, 60]; with T = 6 the bucket width is
    // 10, timestamp 60 lands in the last bucket, and 10 lands in bucket 1.
    std::vector<Rating> log = {
        {100, 900, 1.0, 0.0},   // user 100 -> 0, item 900 -> 0, period 0
        {200, 900, 2.0, 10.0},  // user 200 -> 1, period 1
        {100, 800, 3.0, 59.0},  // item 800 -> 1, period 5
        {300, 700, 4.0, 60.0},  // period 5 (max timestamp clips to T - 1)
    };
    RatingIngest r = ingest_ratings(log, 6);
    CHECK(r.user_ids == std::vector<long long>{100, 200, 300});
    CHECK(r.item_ids == std::vector<long long>{900, 800, 700});
    CHECK(r.tensor.n1 == 3);
    CHECK(r.tensor.n2 == 3);
    CHECK(r.tensor.n3 == 6);
    REQUIRE(r.tensor.entries.size() == 4);
    auto period_of = [&](long long user, long long item) {
        for (const Observation& o : r.tensor.entries) {
            if (r.user_ids[static_cast<size_t>(o.i1)] == user &&
                r.item_ids[static_cast<size_t>(o.i2)] == item)
                return o.i3;
        }
        return Index(-1);
    };
    CHECK(period_of(100, 900) == 0);
    CHECK(period_of(200, 900) == 1);
    CHECK(period_of(100, 800) == 5);
    CHECK(period_of(300, 700) == 5);
    CHECK(r.sparsity == doctest::Approx(4.0 / (3.0 * 3.0 * 6.0)));
}

TEST_CASE("ingest_ratings: movie-rating-scale subsample sparsity") {
    // 466 distinct (user, item, period) ratings over 88 users, 70 items, and
    // 6 periods: sparsity = 466 / 36960, about 1.26%.
    std::mt19937_64 rng(12);
    std::vector<Rating> log;
    std::set<std::tuple<long long, long long, Index>> used;
    auto add = [&](long long u, long long i, Index p) {
        if (!used.insert({u, i, p}).second) return;
        // timestamp = period: with observed range [0, 5] the equal-width
        // buckets map timestamp t to period t exactly
        log.push_back({u, i, 3.0, static_cast<double>(p)});
    };
    for (long long u = 0; u < 88; ++u) add(u, u % 70, static_cast<Index>(u % 6));
    while (log.size() < 466)
        add(static_cast<long long>(rng() % 88), static_cast<long long>(rng() % 70),
            static_cast<Index>(rng() % 6));

    RatingIngest r = ingest_ratings(log, 6);
    CHECK(r.tensor.n1 == 88);
    CHECK(r.tensor.n2 == 70);
    CHECK(r.tensor.n3 == 6);
    CHECK(r.tensor.entries.size() == 466);
    CHECK(r.sparsity == doctest::Approx(0.0126).epsilon(0.01));
}

TEST_CASE("ingest_traffic: reshape, zeros-as-missing, and shape errors") {
    TempDir tmp;
    // 2 segments x (3 intervals * 2 days), row-major; zeros are missing.
    const std::string path = tmp.write("t.txt",
                                       "1 2 0 4 5 6\n"
                                       "0 0 9 10 0 12\n");
    ObservedTensor obs = ingest_traffic(path, 2, 3, 2);
    CHECK(obs.n1 == 2);
    CHECK(obs.n2 == 3);
    CHECK(obs.n3 == 2);
    CHECK(obs.entries.size() == 8);
    auto value_at = [&](Index s, Index iv, Index d) {
        for (const Observation& o : obs.entries)
            if (o.i1 == s && o.i2 == iv && o.i3 == d) return o.value;
        return 0.0;
    };
    // column index col maps to (interval col % 3, day col / 3)
    CHECK(value_at(0, 0, 0) == 1.0);
    CHECK(value_at(0, 1, 0) == 2.0);
    CHECK(value_at(0, 2, 0) == 0.0);  // missing
    CHECK(value_at(0, 0, 1) == 4.0);
    CHECK(value_at(1, 2, 1) == 12.0);

    ObservedTensor keep = ingest_traffic(path, 2, 3, 2, /*zeros_are_values=*/true);
    CHECK(keep.entries.size() == 12);

    const std::string zeros = tmp.write("z.txt", "0 0 0 0 0 0 0 0 0 0 0 0\n");
    CHECK(ingest_traffic(zeros, 2, 3, 2).entries.empty());

    CHECK_THROWS_AS(ingest_traffic(tmp.write("short.txt", "1 2 3\n"), 2, 3, 2),
                    DataError);
    CHECK_THROWS_AS(ingest_traffic(path, 2, 3, 1), DataError);  // trailing values
    CHECK_THROWS_AS(ingest_traffic(path, 0, 3, 2), DataError);
}

TEST_CASE("ingest_traffic: road-network-scale reshape") {
    // 214 segments x 144 intervals x 60 days; sparse nonzeros keep the file
    // small with zeros-as-missing.
    TempDir tmp;
    const Index segments = 214, intervals = 144, days = 60;
    const Index cols = intervals * days;
    {
        std::ofstream out(tmp.dir / "g.txt");
        for (Index row = 0; row < segments; ++row) {
            for (Index col = 0; col < cols; ++col)
                out << ((row + col) % 5000 == 0 ? 7.0 : 0.0) << ' ';
            out << '\n';
        }
    }
    ObservedTensor obs = ingest_traffic((tmp.dir / "g.txt").string(), segments,
                                        intervals, days);
    CHECK(obs.n1 == 214);
    CHECK(obs.n2 == 144);
    CHECK(obs.n3 == 60);
    Index want = 0;
    for (Index row = 0; row < segments; ++row)
        for (Index col = 0; col < cols; ++col)
            if ((row + col) % 5000 == 0) ++want;
    CHECK(static_cast<Index>(obs.entries.size()) == want);
    for (const Observation& o : obs.entries) {
        CHECK(o.value == 7.0);
        CHECK((o.i1 + o.i2 + intervals * o.i3) % 5000 == 0);
    }
}

TEST_CASE("evaluate: trivial and Pythagorean hand cases") {
    RTensor truth(1, 2, 1);
    truth(0, 0, 0) = 3.0;
    truth(0, 1, 0) = 4.0;
    std::vector<Observation> test = {{0, 0, 0, 3.0}, {0, 1, 0, 4.0}};

    CHECK(evaluate(truth, test).re == 0.0);
    CHECK(evaluate(truth, test).rmse == 0.0);

    RTensor zero(1, 2, 1);
    CHECK(evaluate(zero, test).re == doctest::Approx(1.0));
    CHECK(evaluate(zero, test).rmse == doctest::Approx(std::sqrt(25.0 / 2.0)));

    RTensor partial(1, 2, 1);
    partial(0, 0, 0) = 3.0;  // estimate (3, 0) against truth (3, 4)
    CHECK(evaluate(partial, test).re == doctest::Approx(4.0 / 5.0));
    CHECK(evaluate(partial, test).rmse == doctest::Approx(std::sqrt(16.0 / 2.0)));

    CHECK_THROWS_AS(evaluate(truth, {}), DataError);
}

TEST_CASE("config: parsing, comments, and unknown-key rejection") {
    std::istringstream in(
        "# shape\n"
        "m = 10\n"
        "n=12\n"
        "T = 8\n"
        "gen_rank = 3\n"
        "\n"
        "ratios = 0.05, 0.1 ,0.2\n"
        "intervals = 4,8\n"
        "noise = none\n"
        "transform = identity\n"
        "with_replacement = yes\n"
        "lambda_g = 0.001  # paper default\n");
    ExperimentConfig cfg = ExperimentConfig::parse(in);
    CHECK(cfg.m == 10);
    CHECK(cfg.n == 12);
    CHECK(cfg.T == 8);
    CHECK(cfg.gen_rank == 3);
    CHECK(cfg.ratios == std::vector<double>{0.05, 0.1, 0.2});
    CHECK(cfg.intervals == std::vector<Index>{4, 8});
    CHECK(cfg.noise == NoiseKind::none);
    CHECK(cfg.solver.transform == SolverTransform::identity);
    CHECK(cfg.with_replacement);
    CHECK(cfg.solver.lambda_g == 0.001);

    ExperimentConfig bad;
    CHECK_THROWS_AS(bad.set("lambda_2", "0.1"), ConfigError);
    CHECK_THROWS_AS(bad.set("m", "ten"), ConfigError);
    CHECK_THROWS_AS(bad.set("noise", "poisson"), ConfigError);
    CHECK_THROWS_AS(bad.set("ratios", " , "), ConfigError);

    std::istringstream noeq("m 10\n");
    CHECK_THROWS_AS(ExperimentConfig::parse(noeq), ConfigError);
    std::istringstream nokey("= 10\n");
    CHECK_THROWS_AS(ExperimentConfig::parse(nokey), ConfigError);
}

TEST_CASE("config: validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig bad = cfg;
    bad.gen_rank = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.gen_rank = bad.m + 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.sample_ratio = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.sigma = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.folds = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.solver.ss = 3;  // must divide T = 64
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config: resolved text reparses to a fixed point") {
    ExperimentConfig cfg;
    cfg.m = 17;
    cfg.T = 12;
    cfg.interval = 3;
    cfg.solver.ss = 4;
    cfg.solver.lambda_g = 0.25;
    cfg.sigma = 0.3;
    cfg.ss_grid = {1, 2, 4};
    cfg.data_file = "obs.coo";
    cfg.noise = NoiseKind::none;

    const std::string text = cfg.resolved_text();
    std::istringstream in(text);
    ExperimentConfig back = ExperimentConfig::parse(in);
    CHECK(back.resolved_text() == text);
    CHECK(back.m == 17);
    CHECK(back.interval == 3);
    CHECK(back.solver.ss == 4);
    CHECK(back.solver.lambda_g == 0.25);
    CHECK(back.ss_grid == std::vector<Index>{1, 2, 4});
    CHECK(back.data_file == "obs.coo");
    CHECK(back.noise == NoiseKind::none);
}

// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>
#include <string>

#include <doctest.h>

#include "ftcost/batch_model.hpp"
#include "ftcost/cost_model.hpp"
#include "ftcost/throughput_model.hpp"

using namespace ftcost;

namespace {

const std::string kDataDir = FTCOST_TEST_DATA_DIR;

// A catalog where prediction arithmetic is easy to follow by hand: batch
// coefficients (1, 0) predict floor((gpu_mem - model_mem) / seq_len), and the
// literal throughput form with c3 = 1 at sparsity 1 gives c2*ln(bs) + c4.
Catalog toy_catalog() {
    Catalog cat;
    GpuSpec a{"gpu-a", 40.0, 0.79, std::nullopt, std::nullopt};
    GpuSpec b{"gpu-b", 40.0, 2.1, std::nullopt, std::nullopt};
    GpuSpec unpriced{"gpu-free", 40.0, std::nullopt, std::nullopt, std::nullopt};
    cat.gpus = {a, b, unpriced};

    ModelSpec m;
    m.name = "toy";
    m.param_count = 1000;
    m.resident_memory_gib = 20.0;
    m.num_layers = 4;
    m.num_moe_layers = 2;
    m.num_experts = 8;
    m.default_top_k = 2;
    m.batch_coeffs = BatchCoeffs{1.0, 0.0};
    m.throughput_coeffs[{"data", "gpu-a", ThroughputForm::Literal}] =
        ThroughputCoeffs{0.5, 1.0, 1.01, ThroughputForm::Literal};
    m.throughput_coeffs[{"data", "gpu-b", ThroughputForm::Literal}] =
        ThroughputCoeffs{0.5, 1.0, 4.90, ThroughputForm::Literal};
    cat.models = {m};

    cat.datasets = {DatasetSpec{"data", 15000, 20, "toy"}};
    return cat;
}

CostQuery toy_query() {
    CostQuery q;
    q.model = "toy";
    q.dataset = "data";
    q.gpu = "gpu-a";
    q.sparsity = 1.0;
    q.epochs = 10;
    return q;
}

}  // namespace

TEST_CASE("estimate arithmetic reproduces the published cost scale") {
    Catalog cat = toy_catalog();
    CostQuery q = toy_query();
    // (40 - 20) / 20 -> batch 1, so throughput is exactly the intercept 1.01
    CostEstimate est = estimate_cost(cat, q);
    CHECK(est.max_batch_size == 1);
    CHECK(est.throughput_qps == 1.01);
    CHECK(est.wall_seconds == doctest::Approx(148514.8514851485).epsilon(1e-12));
    CHECK(est.total_usd == doctest::Approx(32.59075907590759).epsilon(1e-12));
    CHECK(est.hourly_price_usd == 0.79);

    q.gpu = "gpu-b";
    CostEstimate h = estimate_cost(cat, q);
    CHECK(h.throughput_qps == 4.90);
    CHECK(h.total_usd == doctest::Approx(17.857142857142858).epsilon(1e-12));
}

TEST_CASE("estimate is exactly the composition of the two models") {
    Catalog cat = load_catalog(kDataDir + "/table4.json");
    CostQuery q;
    q.model = "Mixtral";
    q.dataset = "GS";
    q.gpu = "H100";
    q.sparsity = 0.25;
    q.epochs = 10;
    q.override_queries = 15000;
    CostEstimate est = estimate_cost(cat, q);

    const ModelSpec& model = cat.model("Mixtral");
    int mbs = predict_max_batch(*model.batch_coeffs, 80.0, model.resident_memory_gib, 148, 0.25);
    const ThroughputCoeffs& tc = model.throughput_coeffs.at({"GS", "H100", ThroughputForm::Literal});
    double qps = predict_throughput(tc, mbs, 0.25);
    double wall = 150000.0 / qps;
    CHECK(est.max_batch_size == mbs);
    CHECK(est.throughput_qps == qps);
    CHECK(est.wall_seconds == wall);
    CHECK(est.total_usd == wall / 3600.0 * 2.1);
}

TEST_CASE("estimate precondition and failure diagnostics") {
    Catalog cat = toy_catalog();
    CostQuery q = toy_query();

    q.epochs = 0;
    CHECK_THROWS_AS(estimate_cost(cat, q), InputError);
    q.epochs = 10;

    q.sparsity = 0.0;
    CHECK_THROWS_AS(estimate_cost(cat, q), InputError);
    q.sparsity = 1.0;

    q.gpu = "gpu-free";
    CHECK_THROWS_WITH_AS(estimate_cost(cat, q), doctest::Contains("gpu-free"), DomainError);
    q.gpu = "gpu-a";

    q.dataset = "nowhere";
    CHECK_THROWS_WITH_AS(estimate_cost(cat, q), doctest::Contains("nowhere"), InputError);
    q.dataset = "data";

    Catalog uncalibrated = toy_catalog();
    uncalibrated.models[0].batch_coeffs.reset();
    CHECK_THROWS_WITH_AS(estimate_cost(uncalibrated, q), doctest::Contains("batch coefficients"),
                         DomainError);

    Catalog no_tc = toy_catalog();
    no_tc.models[0].throughput_coeffs.clear();
    CHECK_THROWS_WITH_AS(estimate_cost(no_tc, q), doctest::Contains("gpu-a"), DomainError);

    // model larger than GPU memory: predicted batch 0 is a domain failure here
    Catalog big = toy_catalog();
    big.models[0].resident_memory_gib = 45.0;
    CHECK_THROWS_WITH_AS(estimate_cost(big, q), doctest::Contains("does not fit"), DomainError);

    // strongly negative intercept drives predicted throughput below zero
    Catalog bad = toy_catalog();
    bad.models[0].throughput_coeffs[{"data", "gpu-a", ThroughputForm::Literal}] =
        ThroughputCoeffs{0.5, 1.0, -100.0, ThroughputForm::Literal};
    CHECK_THROWS_WITH_AS(estimate_cost(bad, q), doctest::Contains("not positive"), DomainError);
}

TEST_CASE("power form is preferred when both forms are stored") {
    Catalog cat = toy_catalog();
    cat.models[0].throughput_coeffs[{"data", "gpu-a", ThroughputForm::Power}] =
        ThroughputCoeffs{0.5, 1.0, 2.22, ThroughputForm::Power};
    CostEstimate est = estimate_cost(cat, toy_query());
    CHECK(est.throughput_qps == 2.22);  // batch 1, dense: intercept of the power entry
}

TEST_CASE("comparison ranks by cost, then time, then name") {
    Catalog cat = load_catalog(kDataDir + "/table4.json");
    CostQuery q;
    q.model = "Mixtral";
    q.dataset = "GS";
    q.sparsity = 0.25;
    q.epochs = 10;
    q.override_queries = 15000;

    auto ranked = compare_gpus(cat, q, {"A40", "A100-80", "H100"});
    REQUIRE(ranked.size() == 3);
    // output is a permutation of the input set
    std::set<std::string> names;
    for (const auto& [name, est] : ranked) names.insert(name);
    CHECK(names == std::set<std::string>{"A40", "A100-80", "H100"});
    CHECK(ranked[0].first == "H100");
    CHECK(ranked[1].first == "A100-80");
    CHECK(ranked[2].first == "A40");
    CHECK(ranked[0].second.total_usd == doctest::Approx(17.9).epsilon(0.02));
    CHECK(ranked[1].second.total_usd == doctest::Approx(25.4).epsilon(0.02));
    CHECK(ranked[2].second.total_usd == doctest::Approx(32.7).epsilon(0.02));

    auto single = compare_gpus(cat, q, {"A40"});
    CHECK(single.size() == 1);

    CHECK_THROWS_AS(compare_gpus(cat, q, {}), InputError);
}

TEST_CASE("identical GPUs tie-break by name") {
    Catalog cat = toy_catalog();
    cat.gpus.push_back(GpuSpec{"gpu-0", 40.0, 0.79, std::nullopt, std::nullopt});
    cat.models[0].throughput_coeffs[{"data", "gpu-0", ThroughputForm::Literal}] =
        ThroughputCoeffs{0.5, 1.0, 1.01, ThroughputForm::Literal};
    auto ranked = compare_gpus(cat, toy_query(), {"gpu-a", "gpu-0"});
    CHECK(ranked[0].first == "gpu-0");
    CHECK(ranked[1].first == "gpu-a");
}

TEST_CASE("per-GPU failures are attributed to the GPU") {
    Catalog cat = toy_catalog();
    CHECK_THROWS_WITH_AS(compare_gpus(cat, toy_query(), {"gpu-a", "gpu-free"}),
                         doctest::Contains("gpu-free"), DomainError);
}

TEST_CASE("dataset scaling is linear and identity at factor one") {
    CostEstimate est;
    est.max_batch_size = 17;
    est.throughput_qps = 4.9;
    est.wall_seconds = 30612.244897959183;
    est.total_usd = 17.857142857142858;
    est.hourly_price_usd = 2.1;

    CHECK(scale_by_dataset(est, 15000, 15000) == est);

    CostEstimate big = scale_by_dataset(est, 15000, 2000000);
    CHECK(big.total_usd == doctest::Approx(2380.952380952381).epsilon(1e-12));
    CHECK(big.max_batch_size == est.max_batch_size);
    CHECK(big.throughput_qps == est.throughput_qps);

    CostEstimate twice = scale_by_dataset(est, 10000, 20000);
    CHECK(twice.total_usd == 2.0 * est.total_usd);
    CHECK(twice.wall_seconds == 2.0 * est.wall_seconds);

    CHECK_THROWS_AS(scale_by_dataset(est, 0, 10), InputError);
    CHECK_THROWS_AS(scale_by_dataset(est, 10, 0), InputError);
}

TEST_CASE("cost is linear in epochs, queries, and price") {
    Catalog cat = toy_catalog();
    CostQuery q = toy_query();
    CostEstimate base = estimate_cost(cat, q);

    q.epochs = 20;
    CHECK(estimate_cost(cat, q).total_usd == doctest::Approx(2.0 * base.total_usd).epsilon(1e-12));
    q.epochs = 10;

    q.override_queries = 30000;
    CHECK(estimate_cost(cat, q).total_usd == doctest::Approx(2.0 * base.total_usd).epsilon(1e-12));
    q.override_queries.reset();

    Catalog pricier = toy_catalog();
    pricier.gpus[0].hourly_price_usd = 1.58;
    CHECK(estimate_cost(pricier, q).total_usd == doctest::Approx(2.0 * base.total_usd).epsilon(1e-12));
}

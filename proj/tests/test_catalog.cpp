// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include <doctest.h>

#include "ftcost/catalog.hpp"

using namespace ftcost;

namespace {

const std::string kDataDir = FTCOST_TEST_DATA_DIR;

std::string minimal_catalog_text() {
    return R"({
      "gpus": [{"name": "A40", "memory_gib": 48.0}],
      "models": [{"name": "Mixtral", "param_count": 47000000000, "resident_memory_gib": 23.35,
                  "num_layers": 32, "num_moe_layers": 8, "num_experts": 8, "default_top_k": 2}],
      "datasets": [{"name": "CS", "num_queries": 15000, "median_seq_len": 79, "task_tag": "common-sense"}],
      "samples": [],
      "batch_observations": []
    })";
}

}  // namespace

TEST_CASE("minimal catalog loads with one of each entity") {
    Catalog cat = parse_catalog(minimal_catalog_text(), "test");
    REQUIRE(cat.gpus.size() == 1);
    REQUIRE(cat.models.size() == 1);
    REQUIRE(cat.datasets.size() == 1);
    CHECK(cat.gpus[0].memory_gib == 48.0);
    CHECK(cat.models[0].resident_memory_gib == 23.35);
    CHECK(cat.datasets[0].median_seq_len == 79);
    CHECK_FALSE(cat.gpus[0].hourly_price_usd.has_value());
}

TEST_CASE("empty-but-valid file yields an empty catalog") {
    Catalog cat = load_catalog(kDataDir + "/empty.json");
    CHECK(cat.gpus.empty());
    CHECK(cat.models.empty());
    CHECK(cat.datasets.empty());
    CHECK(cat.samples.empty());
    CHECK(cat.batch_observations.empty());
}

TEST_CASE("dangling reference names the missing entity") {
    std::string text = R"({
      "gpus": [{"name": "A40", "memory_gib": 48.0}],
      "models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
                  "num_layers": 1, "num_moe_layers": 0, "num_experts": 8, "default_top_k": 2}],
      "datasets": [{"name": "D", "num_queries": 1, "median_seq_len": 1, "task_tag": "t"}],
      "samples": [{"gpu": "B200", "model": "M", "dataset": "D",
                   "sparsity": 1.0, "batch_size": 1, "throughput_qps": 1.0}],
      "batch_observations": []
    })";
    CHECK_THROWS_WITH_AS(parse_catalog(text, "test"), doctest::Contains("B200"), InputError);
}

TEST_CASE("unknown keys are rejected") {
    std::string text = R"({"gpus": [], "models": [], "datasets": [], "samples": [],
                           "batch_observations": [], "surprise": 1})";
    CHECK_THROWS_WITH_AS(parse_catalog(text, "test"), doctest::Contains("surprise"), InputError);
    std::string gpu_extra = R"({"gpus": [{"name": "A", "memory_gib": 1.0, "color": "green"}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(gpu_extra, "test"), doctest::Contains("color"), InputError);
}

TEST_CASE("invariant violations name the field") {
    std::string bad_mem = R"({"gpus": [{"name": "A", "memory_gib": -1.0}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(bad_mem, "test"), doctest::Contains("memory_gib"), InputError);

    std::string bad_topk = R"({"models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
        "num_layers": 4, "num_moe_layers": 1, "num_experts": 4, "default_top_k": 5}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(bad_topk, "test"), doctest::Contains("default_top_k"), InputError);

    std::string bad_sparsity = R"({
      "gpus": [{"name": "A", "memory_gib": 1.0}],
      "models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
                  "num_layers": 1, "num_moe_layers": 0, "num_experts": 8, "default_top_k": 2}],
      "datasets": [{"name": "D", "num_queries": 1, "median_seq_len": 1, "task_tag": "t"}],
      "samples": [{"gpu": "A", "model": "M", "dataset": "D",
                   "sparsity": 1.5, "batch_size": 1, "throughput_qps": 1.0}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(bad_sparsity, "test"), doctest::Contains("sparsity"), InputError);
}

TEST_CASE("model throughput coefficients are cross-checked and deduplicated") {
    std::string dangling = R"({
      "gpus": [{"name": "A", "memory_gib": 1.0}],
      "models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
                  "num_layers": 1, "num_moe_layers": 0, "num_experts": 8, "default_top_k": 2,
                  "throughput_coeffs": [{"dataset": "ghost", "gpu": "A", "form": "power",
                                         "c2": 1.0, "c3": 0.5, "c4": 0.1}]}],
      "datasets": [{"name": "D", "num_queries": 1, "median_seq_len": 1, "task_tag": "t"}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(dangling, "test"), doctest::Contains("ghost"), InputError);

    std::string duplicate = R"({
      "gpus": [{"name": "A", "memory_gib": 1.0}],
      "models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
                  "num_layers": 1, "num_moe_layers": 0, "num_experts": 8, "default_top_k": 2,
                  "throughput_coeffs": [
                    {"dataset": "D", "gpu": "A", "form": "power", "c2": 1.0, "c3": 0.5, "c4": 0.1},
                    {"dataset": "D", "gpu": "A", "form": "power", "c2": 2.0, "c3": 0.6, "c4": 0.2}]}],
      "datasets": [{"name": "D", "num_queries": 1, "median_seq_len": 1, "task_tag": "t"}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(duplicate, "test"), doctest::Contains("duplicate"), InputError);

    std::string bad_c3 = R"({
      "gpus": [{"name": "A", "memory_gib": 1.0}],
      "models": [{"name": "M", "param_count": 1, "resident_memory_gib": 1.0,
                  "num_layers": 1, "num_moe_layers": 0, "num_experts": 8, "default_top_k": 2,
                  "throughput_coeffs": [{"dataset": "D", "gpu": "A", "form": "literal",
                                         "c2": 1.0, "c3": 0.0, "c4": 0.1}]}],
      "datasets": [{"name": "D", "num_queries": 1, "median_seq_len": 1, "task_tag": "t"}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(bad_c3, "test"), doctest::Contains("c3"), InputError);
}

TEST_CASE("CRLF line endings are accepted in samples CSV") {
    std::string crlf = "gpu,model,dataset,sparsity,batch_size,throughput_qps\r\nA,B,C,0.5,2,1.25\r\n";
    auto samples = parse_samples_csv(crlf, "test");
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].sparsity == 0.5);
    CHECK(samples[0].throughput_qps == 1.25);
}

TEST_CASE("parse errors carry a line location") {
    std::string text = "{\n  \"gpus\": [,]\n}";
    CHECK_THROWS_WITH_AS(parse_catalog(text, "broken.json"), doctest::Contains("line 2"), InputError);
}

TEST_CASE("duplicate names are rejected") {
    std::string text = R"({"gpus": [{"name": "A", "memory_gib": 1.0}, {"name": "A", "memory_gib": 2.0}]})";
    CHECK_THROWS_WITH_AS(parse_catalog(text, "test"), doctest::Contains("duplicate"), InputError);
}

TEST_CASE("loading is a pure function of the file bytes") {
    Catalog a = load_catalog(kDataDir + "/table3.json");
    Catalog b = load_catalog(kDataDir + "/table3.json");
    CHECK(a == b);
}

TEST_CASE("serialize-then-load is a fixpoint") {
    for (const char* name : {"/table3.json", "/table4.json", "/empty.json"}) {
        Catalog loaded = load_catalog(kDataDir + name);
        std::string text = catalog_to_json(loaded);
        Catalog reloaded = parse_catalog(text, "roundtrip");
        CHECK(loaded == reloaded);
        // and the serialization itself is stable
        CHECK(catalog_to_json(reloaded) == text);
    }
}

TEST_CASE("table3 fixture carries the expected observations") {
    Catalog cat = load_catalog(kDataDir + "/table3.json");
    REQUIRE(cat.batch_observations.size() == 8);
    CHECK(cat.model("Mixtral").published_batch_coeffs->c0 == 82.0);
    CHECK(cat.dataset("CS").median_seq_len == 79);
    CHECK(cat.dataset("MATH").median_seq_len == 174);
    CHECK(cat.gpu("A40").memory_gib == 48.0);
}

TEST_CASE("sparsity_of") {
    ModelSpec m;
    m.name = "M";
    m.num_experts = 8;
    CHECK(sparsity_of(m, 8) == 1.0);
    CHECK(sparsity_of(m, 2) == 0.25);
    CHECK_THROWS_AS(sparsity_of(m, 0), InputError);
    CHECK_THROWS_AS(sparsity_of(m, 9), InputError);
    for (int experts = 1; experts <= 64; ++experts) {
        m.num_experts = experts;
        CHECK(sparsity_of(m, experts) == 1.0);
    }
}

TEST_CASE("samples CSV parses the exact header only") {
    std::string good = "gpu,model,dataset,sparsity,batch_size,throughput_qps\nA,B,C,0.25,4,1.5\n";
    auto samples = parse_samples_csv(good, "test");
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].gpu == "A");
    CHECK(samples[0].sparsity == 0.25);
    CHECK(samples[0].batch_size == 4);

    std::string reordered = "model,gpu,dataset,sparsity,batch_size,throughput_qps\nB,A,C,0.25,4,1.5\n";
    CHECK_THROWS_AS(parse_samples_csv(reordered, "test"), InputError);
}

TEST_CASE("malformed CSV rows report 1-based line numbers") {
    std::string bad = "gpu,model,dataset,sparsity,batch_size,throughput_qps\nA,B,C,0.25,4,1.5\nA,B,C,x,4,1.5\n";
    CHECK_THROWS_WITH_AS(parse_samples_csv(bad, "test"), doctest::Contains("line 3"), InputError);
    std::string short_row = "gpu,model,dataset,sparsity,batch_size,throughput_qps\nA,B,C,0.25\n";
    CHECK_THROWS_WITH_AS(parse_samples_csv(short_row, "test"), doctest::Contains("line 2"), InputError);
}

TEST_CASE("samples CSV round trip") {
    std::vector<ProfileSample> samples{
        {"A40", "Mixtral", "CS", 0.25, 1, 0.368},
        {"A40", "Mixtral", "CS", 1.0, 2, 0.5},
        {"A40", "Mixtral", "CS", 0.125, 16, 3.14159265358979},
    };
    auto reparsed = parse_samples_csv(samples_to_csv(samples), "roundtrip");
    CHECK(reparsed == samples);
}

TEST_CASE("corrupted catalog bytes always fail as input errors, never crash") {
    std::ifstream in(kDataDir + "/table3.json", std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(!text.empty());
    std::mt19937_64 rng(8675309);
    const char junk[] = "{}[]\",:0e-xნ\x01\x7f";
    for (int trial = 0; trial < 500; ++trial) {
        std::string mutated = text;
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            std::size_t pos = rng() % mutated.size();
            switch (rng() % 3) {
                case 0: mutated[pos] = junk[rng() % (sizeof(junk) - 1)]; break;
                case 1: mutated.erase(pos, 1 + rng() % 5); break;
                default: mutated.insert(pos, 1, junk[rng() % (sizeof(junk) - 1)]); break;
            }
            if (mutated.empty()) mutated = "x";
        }
        try {
            Catalog cat = parse_catalog(mutated, "fuzz");
            (void)cat;  // a mutation can still be valid JSON; that's fine
        } catch (const InputError&) {
        }
        // anything else (std::bad_alloc, json exceptions, UB crash) fails the test
    }
    CHECK(true);
}

TEST_CASE("catalog invariants reject bad CSV values") {
    std::string zero_qps = "gpu,model,dataset,sparsity,batch_size,throughput_qps\nA,B,C,1.0,1,0\n";
    CHECK_THROWS_AS(parse_samples_csv(zero_qps, "test"), InputError);
    std::string zero_bs = "gpu,model,dataset,sparsity,batch_size,throughput_qps\nA,B,C,1.0,0,1.0\n";
    CHECK_THROWS_AS(parse_samples_csv(zero_bs, "test"), InputError);
}

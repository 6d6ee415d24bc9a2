#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "specbudget/ensemble_spec.hpp"
#include "specbudget/matrix.hpp"
#include "specbudget/matrix_io.hpp"

using namespace specbudget;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("specbudget_test_" + std::to_string(rng::word_at(
                                         static_cast<std::uint64_t>(
                                             std::chrono::steady_clock::now().time_since_epoch().count()),
                                         0)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    fs::path file(const std::string& name) const { return path / name; }
};

void write_raw(const fs::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_raw(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("binary round trip is bit exact for float64") {
    TempDir dir;
    const FeatureMatrix m = FeatureMatrix::standard_normal(8, 5, 42);
    const fs::path p = dir.file("m.eapm");
    io::write_matrix(m, p);
    const FeatureMatrix back = io::read_matrix(p);
    REQUIRE(back.rows() == 8);
    REQUIRE(back.cols() == 5);
    CHECK((back.data().array() == m.data().array()).all());
}

TEST_CASE("float32 payloads round trip within single precision") {
    TempDir dir;
    const FeatureMatrix m = FeatureMatrix::standard_normal(6, 7, 3);
    const fs::path p = dir.file("m32.eapm");
    io::write_matrix(m, p, io::MatrixDType::Float32);
    const FeatureMatrix back = io::read_matrix(p);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            CHECK(std::abs(back.data()(i, j) - m.data()(i, j)) <=
                  1.2e-7 * std::abs(m.data()(i, j)));
}

TEST_CASE("format violations raise the specific error") {
    TempDir dir;
    const FeatureMatrix m = FeatureMatrix::standard_normal(3, 4, 1);
    const fs::path good = dir.file("good.eapm");
    io::write_matrix(m, good);
    const std::string bytes = read_raw(good);

    SECTION("wrong magic") {
        std::string bad = bytes;
        bad[0] = 'X'; bad[1] = 'X'; bad[2] = 'X'; bad[3] = 'X';
        const fs::path p = dir.file("magic.eapm");
        write_raw(p, bad);
        CHECK_THROWS_AS(io::read_matrix(p), BadMagic);
    }
    SECTION("unsupported version") {
        std::string bad = bytes;
        bad[4] = 2;
        const fs::path p = dir.file("version.eapm");
        write_raw(p, bad);
        CHECK_THROWS_AS(io::read_matrix(p), BadVersion);
    }
    SECTION("payload cut short") {
        const fs::path p = dir.file("short.eapm");
        write_raw(p, bytes.substr(0, bytes.size() - 5));
        CHECK_THROWS_AS(io::read_matrix(p), TruncatedPayload);
    }
    SECTION("header cut short") {
        const fs::path p = dir.file("header.eapm");
        write_raw(p, bytes.substr(0, 10));
        CHECK_THROWS_AS(io::read_matrix(p), TruncatedPayload);
    }
    SECTION("trailing bytes") {
        const fs::path p = dir.file("long.eapm");
        write_raw(p, bytes + "xx");
        CHECK_THROWS_AS(io::read_matrix(p), ParseError);
    }
    SECTION("unknown dtype") {
        std::string bad = bytes;
        bad[16] = 7;
        const fs::path p = dir.file("dtype.eapm");
        write_raw(p, bad);
        CHECK_THROWS_AS(io::read_matrix(p), ParseError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(io::read_matrix(dir.file("absent.eapm")), IoError);
    }
}

TEST_CASE("csv parsing") {
    TempDir dir;
    SECTION("basic two by two") {
        const fs::path p = dir.file("m.csv");
        write_raw(p, "1,2\n3,4\n");
        const FeatureMatrix m = io::read_matrix(p);
        REQUIRE(m.rows() == 2);
        REQUIRE(m.cols() == 2);
        CHECK(m.data()(0, 0) == 1.0);
        CHECK(m.data()(0, 1) == 2.0);
        CHECK(m.data()(1, 0) == 3.0);
        CHECK(m.data()(1, 1) == 4.0);
    }
    SECTION("whitespace and scientific notation") {
        const fs::path p = dir.file("ws.csv");
        write_raw(p, " 1.5 , -2e3\n0.25, 7\n");
        const FeatureMatrix m = io::read_matrix(p);
        CHECK(m.data()(0, 1) == -2000.0);
        CHECK(m.data()(1, 0) == 0.25);
    }
    SECTION("ragged rows carry line diagnostics") {
        const fs::path p = dir.file("ragged.csv");
        write_raw(p, "1,2\n3\n");
        try {
            io::read_matrix(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SECTION("non-numeric field names the position") {
        const fs::path p = dir.file("alpha.csv");
        write_raw(p, "1,2\n3,four\n");
        try {
            io::read_matrix(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("line 2") != std::string::npos);
            CHECK(msg.find("field 2") != std::string::npos);
        }
    }
    SECTION("empty file") {
        const fs::path p = dir.file("empty.csv");
        write_raw(p, "");
        CHECK_THROWS_AS(io::read_matrix(p), ParseError);
    }
    SECTION("csv write-read round trip preserves doubles") {
        const FeatureMatrix m = FeatureMatrix::standard_normal(5, 3, 8);
        const fs::path p = dir.file("rt.csv");
        io::write_matrix(m, p);
        const FeatureMatrix back = io::read_matrix(p);
        CHECK((back.data().array() == m.data().array()).all());
    }
}

TEST_CASE("ensemble specs") {
    TempDir dir;
    SECTION("explicit profiles with repeat") {
        const fs::path p = dir.file("spec.json");
        write_raw(p, R"({
            "n_v": 16, "d_v": 20, "seed": 9, "repeat": 3,
            "profiles": [
                {"kind": "exponential", "n": 12, "ratio": 0.8},
                {"kind": "flat", "n": 10}
            ]
        })");
        const io::EnsembleSpec spec = io::load_ensemble_spec(p);
        CHECK(spec.size() == 6);
        CHECK(spec.n_v == 16);
        CHECK(spec.d_v == 20);

        const auto all = spec.materialize();
        const FeatureMatrix third = spec.instance(3);
        CHECK((third.data().array() == all[3].data().array()).all());
    }
    SECTION("built-in family") {
        const fs::path p = dir.file("family.json");
        write_raw(p, R"({"n_v": 32, "d_v": 24, "seed": 1, "family": "mixed", "count": 7})");
        const io::EnsembleSpec spec = io::load_ensemble_spec(p);
        CHECK(spec.size() == 7);
    }
    SECTION("missing fields are reported by name") {
        const fs::path p = dir.file("bad1.json");
        write_raw(p, R"({"n_v": 16, "d_v": 20, "profiles": [{"kind": "flat"}]})");
        try {
            io::load_ensemble_spec(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("'n'") != std::string::npos);
        }
    }
    SECTION("malformed json is a ParseError") {
        const fs::path p = dir.file("bad2.json");
        write_raw(p, "{not json");
        CHECK_THROWS_AS(io::load_ensemble_spec(p), ParseError);
    }
    SECTION("unknown profile kind") {
        const fs::path p = dir.file("bad3.json");
        write_raw(p, R"({"n_v": 4, "d_v": 4, "profiles": [{"kind": "zigzag", "n": 2}]})");
        CHECK_THROWS_AS(io::load_ensemble_spec(p), ParseError);
    }
    SECTION("profiles and family are mutually exclusive") {
        const fs::path p = dir.file("bad4.json");
        write_raw(p, R"({"n_v": 4, "d_v": 4, "family": "mixed", "count": 2,
                         "profiles": [{"kind": "flat", "n": 2}]})");
        CHECK_THROWS_AS(io::load_ensemble_spec(p), ParseError);
    }
}

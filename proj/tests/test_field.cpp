#include <cmath>
#include <sstream>

#include "blpp/field.hpp"
#include "blpp/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace blpp;

TEST_CASE("field is deterministic and anchored at zero") {
    const GridSpec spec{8, -2, 3, -1, 4};
    const BrownianField a(spec, 42);
    const BrownianField b(spec, 42);
    CHECK(a.bitwise_equal(b));
    const BrownianField c(spec, 43);
    CHECK(!a.bitwise_equal(c));
    for (int m = spec.m_min; m <= spec.m_max; ++m) CHECK(a.line(m)[0] == 0.0);
}

TEST_CASE("integer increments telescope to block endpoint sums") {
    const GridSpec spec{4, -1, 4, 0, 2};
    const BrownianField field(spec, 7);
    for (int m = 0; m <= 2; ++m) {
        for (int i = -1; i < 4; ++i) {
            double block_sum = 0.0;
            for (double v : field.block_increments(i, m)) block_sum += v;
            const double left = field.value_at(m, i);
            const double right = field.value_at(m, i + 1);
            CHECK(right - left == doctest::Approx(block_sum).epsilon(1e-12));
        }
    }
}

TEST_CASE("sampled increments have the prescribed variance") {
    const GridSpec spec{8, 0, 125, 0, 99};  // 100 lines x 125 blocks x 8 = 10^5 increments
    const BrownianField field(spec, 2024);
    double sum = 0.0, sumsq = 0.0;
    int64_t count = 0;
    for (int m = 0; m <= 99; ++m) {
        for (int i = 0; i < 125; ++i) {
            for (double v : field.block_increments(i, m)) {
                sum += v;
                sumsq += v * v;
                ++count;
            }
        }
    }
    CHECK(count == 100000);
    const double mu = sum / count;
    const double var = sumsq / count - mu * mu;
    CHECK(var == doctest::Approx(1.0 / 8.0).epsilon(0.05));
}

TEST_CASE("stored values match an independent summation") {
    const GridSpec spec{8, -3, 3, 0, 4};
    const BrownianField field(spec, 11);
    for (int m = 0; m <= 4; ++m) {
        long double acc = 0.0L;
        int j = 0;
        CHECK(field.value_at_index(m, j) == 0.0);
        for (int i = -3; i < 3; ++i) {
            for (double v : field.block_increments(i, m)) {
                acc += v;
                ++j;
                const double expect = static_cast<double>(acc);
                CHECK(field.value_at_index(m, j) == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("resample then revert restores the field bit-exactly") {
    const GridSpec spec{16, 0, 6, 0, 5};
    BrownianField field(spec, 5);
    const BrownianField before(spec, 5);
    const FieldDelta delta = field.resample_block(2, 3, 991);
    CHECK(!field.bitwise_equal(before));
    CHECK(delta.shift != 0.0);
    field.revert_delta(delta);
    CHECK(field.bitwise_equal(before));
}

TEST_CASE("resampling one block leaves all other lines untouched") {
    const GridSpec spec{8, 0, 5, 0, 6};
    BrownianField field(spec, 9);
    const BrownianField before(spec, 9);
    field.resample_block(1, 4, 123);
    for (int m = 0; m <= 6; ++m) {
        if (m == 4) continue;
        const auto now = field.line(m);
        const auto was = before.line(m);
        for (size_t j = 0; j < now.size(); ++j) CHECK(now[j] == was[j]);
    }
    // on the resampled line, values left of the block are untouched
    const auto now = field.line(4);
    const auto was = before.line(4);
    for (int j = 0; j <= 1 * spec.grid; ++j) CHECK(now[j] == was[j]);
}

TEST_CASE("a long resample sequence stays consistent with its blocks") {
    const GridSpec spec{8, -2, 4, -1, 4};
    BrownianField field(spec, 77);
    Rng rng(1);
    for (int step = 0; step < 1000; ++step) {
        const int i = spec.x_min + static_cast<int>(rng.below(spec.units()));
        const int m = spec.m_min + static_cast<int>(rng.below(spec.lines()));
        field.resample_block(i, m, derive(77, Stream::Resample, i, m, step));
    }
    // the stored values still match a fresh summation of the block data
    CHECK(field.max_block_rebuild_deviation() == 0.0);
}

TEST_CASE("snapshot dump/load round trips") {
    const GridSpec spec{4, -2, 2, 3, 6};
    const BrownianField field(spec, 17);
    std::stringstream ss;
    field.dump(ss);
    ss.seekg(0);
    const BrownianField loaded = BrownianField::load(ss);
    CHECK(field.bitwise_equal(loaded));
    CHECK(loaded.max_block_rebuild_deviation() <= 1e-12);
}

TEST_CASE("scaled copy realizes the diffusive scaling at grid points") {
    const GridSpec spec{8, 0, 4, 0, 2};
    const BrownianField field(spec, 3);
    const BrownianField same = field.scaled_copy(1);
    CHECK(field.bitwise_equal(same));

    const BrownianField scaled = field.scaled_copy(4);
    CHECK(scaled.spec().grid == 2);
    CHECK(scaled.spec().x_min == 0);
    CHECK(scaled.spec().x_max == 16);
    for (int m = 0; m <= 2; ++m) {
        for (int j = 0; j < spec.width(); ++j) {
            const double x = spec.x_of(j);
            CHECK(scaled.value_at(m, 4.0 * x) ==
                  doctest::Approx(2.0 * field.value_at(m, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("invalid specs and out-of-range access are rejected") {
    CHECK_THROWS_AS(BrownianField(GridSpec{0, 0, 1, 0, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(BrownianField(GridSpec{4, 2, 2, 0, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(BrownianField(GridSpec{4, 0, 1, 3, 2}, 1), std::invalid_argument);

    BrownianField field(GridSpec{4, 0, 2, 0, 1}, 1);
    CHECK_THROWS_AS(field.value_at(0, 2.1), std::invalid_argument);
    CHECK_THROWS_AS(field.value_at(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(field.value_at(0, 0.1), std::invalid_argument);  // off grid
    CHECK_THROWS_AS(field.resample_block(2, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(field.resample_block(0, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(field.scaled_copy(3), std::invalid_argument);  // 3 does not divide 4
}

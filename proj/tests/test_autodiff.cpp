#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gradcheck.hpp"
#include "mot/core/layers.hpp"

using namespace mot::core;
using gradcheck::DId;
using gradcheck::DTape;
using gradcheck::DTensor;

namespace {

Rng make_rng(std::uint64_t seed) { return Rng(seed); }

void expect_ok(const gradcheck::Report& rep, double tol = 1e-3) {
    CHECK(rep.checked > 0);
    CHECK(rep.max_rel_err < tol);
}

} // namespace

TEST_CASE("backward of sum is all ones") {
    Rng rng = make_rng(1);
    DTape tape;
    auto x = tape.leaf(DTensor::uniform({3, 4}, rng, -1.0, 1.0), true);
    tape.backward(sum(tape, x));
    for (double g : tape.grad(x).v) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("backward of x*x at x=3 is 6") {
    DTape tape;
    auto x = tape.leaf(DTensor::scalar(3.0), true);
    tape.backward(mul(tape, x, x));
    CHECK(tape.grad(x).v[0] == doctest::Approx(6.0));
}

TEST_CASE("backward rejects non-scalar loss") {
    DTape tape;
    auto x = tape.leaf(DTensor::full({2, 2}, 1.0), true);
    CHECK_THROWS(tape.backward(x));
}

TEST_CASE("backward rejects unrecorded node ids") {
    DTape tape;
    CHECK_THROWS(tape.backward(17));
}

TEST_CASE("gradcheck: dense") {
    Rng rng = make_rng(42);
    std::vector<DTensor> inputs = {
        DTensor::uniform({3, 5}, rng), // x
        DTensor::uniform({5, 4}, rng), // w
        DTensor::uniform({4}, rng),    // b
    };
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        return gradcheck::weighted_sum(t, dense(t, in[0], in[1], in[2]), wr);
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: conv2d across stride/dilation/padding") {
    struct Case {
        int stride, dilation;
        Padding pad;
    };
    for (auto [stride, dilation, pad] : {Case{1, 1, Padding::same}, Case{1, 2, Padding::same},
                                         Case{2, 1, Padding::valid}, Case{1, 3, Padding::valid}}) {
        Rng rng = make_rng(1000 + stride * 10 + dilation);
        std::vector<DTensor> inputs = {
            DTensor::uniform({2, 7, 7, 3}, rng),
            DTensor::uniform({3, 3, 3, 4}, rng),
            DTensor::uniform({4}, rng),
        };
        Conv2dSpec spec{stride, dilation, pad};
        auto rep = gradcheck::run(inputs, [spec](DTape& t, const std::vector<DId>& in) {
            Rng wr(7);
            return gradcheck::weighted_sum(t, conv2d(t, in[0], in[1], in[2], spec), wr);
        });
        expect_ok(rep);
    }
}

TEST_CASE("gradcheck: activations") {
    Rng rng = make_rng(5);
    std::vector<DTensor> inputs = {DTensor::uniform({4, 6}, rng, -2.0, 2.0)};

    auto leaky = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        return gradcheck::weighted_sum(t, leaky_relu(t, in[0], 0.1), wr);
    });
    expect_ok(leaky);

    auto soft = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(8);
        return gradcheck::weighted_sum(t, softmax_last(t, in[0]), wr);
    });
    expect_ok(soft);
}

TEST_CASE("gradcheck: batchnorm train and infer") {
    Rng rng = make_rng(11);
    std::vector<DTensor> inputs = {
        DTensor::uniform({6, 3}, rng, -2.0, 2.0),
        DTensor::uniform({3}, rng, 0.5, 1.5), // gamma
        DTensor::uniform({3}, rng),           // beta
    };
    auto train = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        BnStateT<double> state;
        state.running_mean = DTensor::zeros({3});
        state.running_var = DTensor::full({3}, 1.0);
        Rng wr(7);
        return gradcheck::weighted_sum(t, batchnorm(t, in[0], in[1], in[2], state, Mode::train), wr);
    });
    expect_ok(train);

    auto infer = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        BnStateT<double> state;
        state.running_mean = DTensor::full({3}, 0.2);
        state.running_var = DTensor::full({3}, 1.7);
        state.initialized = true;
        Rng wr(7);
        return gradcheck::weighted_sum(t, batchnorm(t, in[0], in[1], in[2], state, Mode::infer), wr);
    });
    expect_ok(infer);
}

TEST_CASE("gradcheck: batchnorm on NHWC") {
    Rng rng = make_rng(12);
    std::vector<DTensor> inputs = {
        DTensor::uniform({2, 3, 3, 2}, rng, -2.0, 2.0),
        DTensor::uniform({2}, rng, 0.5, 1.5),
        DTensor::uniform({2}, rng),
    };
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        BnStateT<double> state;
        state.running_mean = DTensor::zeros({2});
        state.running_var = DTensor::full({2}, 1.0);
        Rng wr(9);
        return gradcheck::weighted_sum(t, batchnorm(t, in[0], in[1], in[2], state, Mode::train), wr);
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: global average pool") {
    Rng rng = make_rng(13);
    std::vector<DTensor> inputs = {DTensor::uniform({2, 4, 5, 3}, rng)};
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        return gradcheck::weighted_sum(t, global_avg_pool(t, in[0]), wr);
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: l2 normalize") {
    Rng rng = make_rng(14);
    std::vector<DTensor> inputs = {DTensor::uniform({4, 6}, rng, 0.2, 1.5)};
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        return gradcheck::weighted_sum(t, l2_normalize_rows(t, in[0]), wr);
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: dropout fixed mask") {
    Rng rng = make_rng(15);
    std::vector<DTensor> inputs = {DTensor::uniform({5, 8}, rng)};
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng drop(99);
        Rng wr(7);
        return gradcheck::weighted_sum(t, dropout(t, in[0], 0.5, Mode::train, drop), wr);
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: elementary ops") {
    Rng rng = make_rng(16);
    std::vector<DTensor> inputs = {DTensor::uniform({3, 4}, rng), DTensor::uniform({3, 4}, rng)};
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        auto lhs = mul(t, in[0], in[1]);
        auto rhs = sub(t, in[0], scalar_mul(t, in[1], 0.5));
        auto cat = concat_last(t, lhs, rhs);
        auto rd = row_dot(t, cat, cat);
        auto c0 = col(t, cat, 2);
        auto sq = sq_l2(t, in[1]);
        auto s = add(t, sum(t, rd), add(t, sum(t, c0), sq));
        (void)wr;
        return s;
    });
    expect_ok(rep);
}

TEST_CASE("gradcheck: slice and reshape") {
    Rng rng = make_rng(17);
    std::vector<DTensor> inputs = {DTensor::uniform({5, 4}, rng)};
    auto rep = gradcheck::run(inputs, [](DTape& t, const std::vector<DId>& in) {
        Rng wr(7);
        auto sl = slice_rows(t, in[0], 1, 4);
        auto rs = reshape(t, sl, {3, 2, 2, 1});
        return gradcheck::weighted_sum(t, global_avg_pool(t, rs), wr);
    });
    expect_ok(rep);
}

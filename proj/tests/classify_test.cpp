#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "emofuse/classify/baseline.hpp"
#include "emofuse/classify/model.hpp"
#include "emofuse/errors.hpp"
#include "oracles.hpp"

using namespace emofuse;
using namespace emofuse::classify;

namespace {

ConvBlockParams random_block(SplitMix64& rng, int in_ch, int out_ch,
                             double kernel_scale = 0.2) {
    ConvBlockParams blk;
    blk.in_channels = in_ch;
    blk.out_channels = out_ch;
    blk.kernels = oracles::random_vector(
        rng, static_cast<Eigen::Index>(out_ch) * in_ch * 9, kernel_scale);
    blk.bias = oracles::random_vector(rng, out_ch, 0.1);
    blk.bn_gamma =
        Eigen::VectorXd::Ones(out_ch) + oracles::random_vector(rng, out_ch, 0.2);
    blk.bn_beta = oracles::random_vector(rng, out_ch, 0.2);
    blk.bn_mean = oracles::random_vector(rng, out_ch, 0.2);
    blk.bn_var =
        (oracles::random_vector(rng, out_ch, 0.5).array() + 1.0).matrix();
    return blk;
}

Tensor random_tensor(SplitMix64& rng, int h, int w, int c) {
    Tensor t(h, w, c);
    t.data = oracles::random_vector(rng, t.size());
    return t;
}

ModelSpec random_model(SplitMix64& rng) {
    ModelSpec m = zero_model();
    int in_ch = 1;
    for (std::size_t b = 0; b < 3; ++b) {
        // small kernels keep activations from exploding through 3 blocks
        m.blocks[b] = random_block(rng, in_ch, kBlockWidths[b], 0.05);
        in_ch = kBlockWidths[b];
    }
    m.head_weight = Eigen::MatrixXd::Zero(kHeadFeatures, 7);
    for (int i = 0; i < kHeadFeatures; ++i) {
        for (int c = 0; c < 7; ++c) {
            m.head_weight(i, c) = 0.01 * (2.0 * rng.next_double() - 1.0);
        }
    }
    m.head_bias = oracles::random_vector(rng, 7, 0.1);
    return m;
}

// Direct reference forward pass built from the oracle conv and the layer
// definitions; shares no code with classify::forward's GEMM path.
EmotionDistribution reference_forward(const ModelSpec& model,
                                      const Tensor& image) {
    Tensor t = image;
    for (const auto& blk : model.blocks) {
        Tensor conv = oracles::naive_conv2d(t, blk);
        for (int y = 0; y < conv.height; ++y) {
            for (int x = 0; x < conv.width; ++x) {
                for (int c = 0; c < conv.channels; ++c) {
                    const double normed =
                        blk.bn_gamma(c) * (conv(y, x, c) - blk.bn_mean(c)) /
                            std::sqrt(blk.bn_var(c) + blk.bn_eps) +
                        blk.bn_beta(c);
                    conv(y, x, c) = std::max(0.0, normed);
                }
            }
        }
        Tensor pooled(conv.height / 2, conv.width / 2, conv.channels);
        for (int y = 0; y < pooled.height; ++y) {
            for (int x = 0; x < pooled.width; ++x) {
                for (int c = 0; c < pooled.channels; ++c) {
                    pooled(y, x, c) = std::max(
                        std::max(conv(2 * y, 2 * x, c),
                                 conv(2 * y, 2 * x + 1, c)),
                        std::max(conv(2 * y + 1, 2 * x, c),
                                 conv(2 * y + 1, 2 * x + 1, c)));
                }
            }
        }
        t = pooled;
    }
    Vector7d logits = model.head_bias;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        for (int c = 0; c < 7; ++c) {
            logits(c) += t.data(i) * model.head_weight(i, c);
        }
    }
    const double m = logits.maxCoeff();
    EmotionDistribution d;
    d.p = (logits.array() - m).exp();
    d.p /= d.p.sum();
    return d;
}

}  // namespace

TEST_CASE("conv2d closed forms") {
    SUBCASE("center-tap kernel is the identity") {
        SplitMix64 rng(5);
        Tensor in = random_tensor(rng, 6, 6, 1);
        ConvBlockParams blk;
        blk.in_channels = 1;
        blk.out_channels = 1;
        blk.kernels = Eigen::VectorXd::Zero(9);
        blk.kernels(4) = 1.0;  // (ky=1, kx=1)
        blk.bias = Eigen::VectorXd::Zero(1);
        const Tensor out = conv2d(in, blk);
        CHECK((out.data - in.data).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("all-ones kernel sums the 3x3 input at its center") {
        Tensor in(3, 3, 1);
        for (int i = 0; i < 9; ++i) {
            in.data(i) = i + 1;  // 1..9
        }
        ConvBlockParams blk;
        blk.in_channels = 1;
        blk.out_channels = 1;
        blk.kernels = Eigen::VectorXd::Ones(9);
        blk.bias = Eigen::VectorXd::Zero(1);
        const Tensor out = conv2d(in, blk);
        CHECK(out(1, 1, 0) == doctest::Approx(45.0));
    }
    SUBCASE("channel mismatch") {
        Tensor in(4, 4, 2);
        ConvBlockParams blk;
        blk.in_channels = 3;
        blk.out_channels = 1;
        blk.kernels = Eigen::VectorXd::Zero(27);
        blk.bias = Eigen::VectorXd::Zero(1);
        CHECK_THROWS_AS(conv2d(in, blk), ShapeError);
    }
}

TEST_CASE("conv2d matches the nested-loop oracle") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int h = 2 + static_cast<int>(rng.next_below(15));
        const int w = 2 + static_cast<int>(rng.next_below(15));
        const int cin = 1 + static_cast<int>(rng.next_below(4));
        const int cout = 1 + static_cast<int>(rng.next_below(4));
        const Tensor in = random_tensor(rng, h, w, cin);
        const ConvBlockParams blk = random_block(rng, cin, cout);
        const Tensor fast = conv2d(in, blk);
        const Tensor slow = oracles::naive_conv2d(in, blk);
        CHECK((fast.data - slow.data).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("batchnorm inference semantics") {
    SplitMix64 rng(23);
    SUBCASE("unit parameters with zero eps are the identity") {
        Tensor in = random_tensor(rng, 4, 4, 3);
        ConvBlockParams blk;
        blk.out_channels = 3;
        blk.bn_gamma = Eigen::VectorXd::Ones(3);
        blk.bn_beta = Eigen::VectorXd::Zero(3);
        blk.bn_mean = Eigen::VectorXd::Zero(3);
        blk.bn_var = Eigen::VectorXd::Ones(3);
        blk.bn_eps = 0.0;
        const Tensor out = batchnorm_infer(in, blk);
        CHECK((out.data - in.data).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("input equal to the mean collapses to beta") {
        ConvBlockParams blk;
        blk.out_channels = 2;
        blk.bn_gamma = Eigen::VectorXd::Constant(2, 1.7);
        blk.bn_beta = Eigen::VectorXd::Constant(2, -0.3);
        blk.bn_mean = Eigen::VectorXd::Constant(2, 4.0);
        blk.bn_var = Eigen::VectorXd::Ones(2);
        Tensor in(2, 2, 2);
        in.data.setConstant(4.0);
        const Tensor out = batchnorm_infer(in, blk);
        CHECK((out.data.array() + 0.3).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("random parameters match the formula") {
        Tensor in = random_tensor(rng, 5, 3, 4);
        ConvBlockParams blk = random_block(rng, 1, 4);
        const Tensor out = batchnorm_infer(in, blk);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 3; ++x) {
                for (int c = 0; c < 4; ++c) {
                    const double expect =
                        blk.bn_gamma(c) * (in(y, x, c) - blk.bn_mean(c)) /
                            std::sqrt(blk.bn_var(c) + blk.bn_eps) +
                        blk.bn_beta(c);
                    CHECK(out(y, x, c) ==
                          doctest::Approx(expect).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("relu") {
    Tensor t(1, 1, 4);
    t.data << -2.0, -0.0, 0.5, 3.0;
    const Tensor out = relu(t);
    CHECK(out.data(0) == 0.0);
    CHECK(out.data(1) == 0.0);
    CHECK(out.data(2) == 0.5);
    CHECK(out.data(3) == 3.0);
    const Tensor again = relu(out);
    CHECK((again.data - out.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("maxpool2d floor semantics") {
    SUBCASE("2x2 block") {
        Tensor t(2, 2, 1);
        t.data << 1, 2, 3, 4;
        const Tensor out = maxpool2d(t);
        CHECK(out.height == 1);
        CHECK(out.width == 1);
        CHECK(out(0, 0, 0) == 4.0);
    }
    SUBCASE("constant stays constant") {
        Tensor t(6, 6, 2);
        t.data.setConstant(0.7);
        const Tensor out = maxpool2d(t);
        CHECK(out.data.minCoeff() == 0.7);
        CHECK(out.data.maxCoeff() == 0.7);
    }
    SUBCASE("odd trailing row and column are dropped") {
        SplitMix64 rng(2);
        const Tensor t = random_tensor(rng, 5, 5, 1);
        const Tensor out = maxpool2d(t);
        CHECK(out.height == 2);
        CHECK(out.width == 2);
    }
}

TEST_CASE("dropout") {
    SplitMix64 rng(9);
    const Tensor t = random_tensor(rng, 10, 10, 1);
    SUBCASE("inference mode is the identity") {
        const Tensor out = dropout(t, 0.5, DropoutMode::Inference, 1);
        CHECK((out.data - t.data).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("p = 0 train mode is the identity") {
        const Tensor out = dropout(t, 0.0, DropoutMode::Train, 1);
        CHECK((out.data - t.data).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("p >= 1 is rejected") {
        CHECK_THROWS_AS(dropout(t, 1.0, DropoutMode::Train, 1),
                        ParameterError);
    }
    SUBCASE("seeded masks are deterministic and mean-preserving") {
        Tensor ones(100, 100, 1);
        ones.data.setOnes();
        const Tensor a = dropout(ones, 0.5, DropoutMode::Train, 42);
        const Tensor b = dropout(ones, 0.5, DropoutMode::Train, 42);
        CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.data.mean() == doctest::Approx(1.0).epsilon(0.1));
        const Tensor c = dropout(ones, 0.5, DropoutMode::Train, 43);
        CHECK((a.data - c.data).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("softmax") {
    SUBCASE("zeros give the uniform distribution") {
        const EmotionDistribution d = softmax(Vector7d::Zero());
        for (int i = 0; i < 7; ++i) {
            CHECK(d.p(i) == 1.0 / 7.0);
        }
    }
    SUBCASE("shift invariance") {
        SplitMix64 rng(31);
        const Vector7d logits = oracles::random_vector(rng, 7, 3.0);
        const EmotionDistribution a = softmax(logits);
        const EmotionDistribution b =
            softmax(logits + Vector7d::Constant(123.0));
        CHECK((a.p - b.p).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("log-ratio closed form with -inf tail") {
        Vector7d logits;
        const double ninf = -std::numeric_limits<double>::infinity();
        logits << std::log(1.0), std::log(2.0), std::log(4.0), ninf, ninf,
            ninf, ninf;
        const EmotionDistribution d = softmax(logits);
        CHECK(d.p(0) == doctest::Approx(1.0 / 7.0));
        CHECK(d.p(1) == doctest::Approx(2.0 / 7.0));
        CHECK(d.p(2) == doctest::Approx(4.0 / 7.0));
        for (int i = 3; i < 7; ++i) {
            CHECK(d.p(i) == 0.0);
        }
    }
}

TEST_CASE("forward pass") {
    SUBCASE("zero model gives exactly uniform output") {
        Tensor image(48, 48, 1);
        image.data.setConstant(0.5);
        ForwardTrace trace;
        const EmotionDistribution d =
            forward(zero_model(), image, &trace);
        for (int i = 0; i < 7; ++i) {
            CHECK(d.p(i) == 1.0 / 7.0);
        }
        CHECK(trace.spatial_after_pool[0] == 24);
        CHECK(trace.spatial_after_pool[1] == 12);
        CHECK(trace.spatial_after_pool[2] == 6);
    }
    SUBCASE("random model emits a valid distribution") {
        SplitMix64 rng(77);
        const ModelSpec m = random_model(rng);
        Tensor image(48, 48, 1);
        image.data = oracles::random_vector(rng, image.size(), 0.5);
        image.data = image.data.cwiseAbs();
        const EmotionDistribution d = forward(m, image);
        CHECK(d.valid(1e-9));
    }
    SUBCASE("matches the layer-by-layer reference composition") {
        SplitMix64 rng(99);
        const ModelSpec m = random_model(rng);
        Tensor image(48, 48, 1);
        image.data = oracles::random_vector(rng, image.size(), 0.5);
        image.data = image.data.cwiseAbs();
        const EmotionDistribution fast = forward(m, image);
        const EmotionDistribution slow = reference_forward(m, image);
        CHECK((fast.p - slow.p).cwiseAbs().maxCoeff() <= 1e-6);
    }
    SUBCASE("wrong input shape names the layer") {
        CHECK_THROWS_WITH_AS(forward(zero_model(), Tensor(47, 48, 1)),
                             doctest::Contains("48x48"), ShapeError);
    }
}

TEST_CASE("model file validation") {
    const ModelSpec m = zero_model();
    const std::string text = model_json(m);

    SUBCASE("round trip") {
        const ModelSpec back = load_model(text);
        CHECK(back.head_weight.isZero());
        Tensor image(48, 48, 1);
        image.data.setConstant(0.25);
        CHECK(forward(back, image).p(0) == doctest::Approx(1.0 / 7.0));
    }
    SUBCASE("wrong block width cites the block") {
        std::string bad = text;
        const auto pos = bad.find("[64,128,256]");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 12, "[64,100,256]");
        CHECK_THROWS_WITH_AS(load_model(bad),
                             doctest::Contains("block2.out_channels"),
                             ShapeError);
    }
    SUBCASE("missing tensor is named") {
        auto j = nlohmann::json::parse(text);
        j["tensors"].erase("block3.bn_mean");
        CHECK_THROWS_WITH_AS(load_model(j.dump()),
                             doctest::Contains("block3.bn_mean"), ShapeError);
    }
    SUBCASE("non-finite payload is rejected") {
        auto j = nlohmann::json::parse(text);
        j["tensors"]["head.bias"]["data"][2] = "nan";
        CHECK_THROWS_AS(load_model(j.dump()), ShapeError);
    }
    SUBCASE("wrong shape is rejected") {
        auto j = nlohmann::json::parse(text);
        j["tensors"]["head.bias"]["shape"] = {6};
        CHECK_THROWS_AS(load_model(j.dump()), ShapeError);
    }
    SUBCASE("bad json is a decode error") {
        CHECK_THROWS_AS(load_model("{"), DecodeError);
    }
}

TEST_CASE("adam_step") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        Eigen::VectorXd params = Eigen::VectorXd::Constant(3, 1.5);
        AdamState state(3);
        adam_step(params, Eigen::VectorXd::Zero(3), state);
        CHECK((params.array() - 1.5).abs().maxCoeff() == 0.0);
        CHECK(state.step == 1);
    }
    SUBCASE("first step moves by about -lr") {
        Eigen::VectorXd params = Eigen::VectorXd::Zero(1);
        AdamState state(1);
        adam_step(params, Eigen::VectorXd::Ones(1), state);
        CHECK(params(0) == doctest::Approx(-0.001).epsilon(1e-6));
    }
    SUBCASE("drives x^2 below 1e-3 within 5000 steps") {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
        AdamState state(1);
        long first_hit = -1;
        for (long t = 1; t <= 5000; ++t) {
            adam_step(x, 2.0 * x, state);
            if (first_hit < 0 && std::abs(x(0)) < 1e-3) {
                first_hit = t;
            }
        }
        CHECK(first_hit > 0);
        CHECK(std::abs(x(0)) < 1e-3);
    }
    SUBCASE("size mismatch") {
        Eigen::VectorXd params = Eigen::VectorXd::Zero(2);
        AdamState state(3);
        CHECK_THROWS_AS(adam_step(params, Eigen::VectorXd::Zero(2), state),
                        ShapeError);
    }
}

TEST_CASE("learning rate schedules") {
    const ScheduleParams params;
    SUBCASE("epoch zero returns lr0 for every kind") {
        for (auto kind : {ScheduleKind::TimeBased, ScheduleKind::Step,
                          ScheduleKind::Exponential}) {
            CHECK(lr_schedule(kind, 0.01, 0, params) == 0.01);
        }
    }
    SUBCASE("closed forms") {
        ScheduleParams p;
        p.decay = 0.5;
        CHECK(lr_schedule(ScheduleKind::TimeBased, 1.0, 4, p) ==
              doctest::Approx(1.0 / 3.0));
        p.drop = 0.5;
        p.period = 10;
        CHECK(lr_schedule(ScheduleKind::Step, 0.02, 10, p) ==
              doctest::Approx(0.01));
        CHECK(lr_schedule(ScheduleKind::Step, 0.02, 9, p) ==
              doctest::Approx(0.02));
        p.k = 0.1;
        CHECK(lr_schedule(ScheduleKind::Exponential, 0.02, 10, p) ==
              doctest::Approx(0.02 * std::exp(-1.0)));
    }
    SUBCASE("names and errors") {
        CHECK(schedule_kind_from_name("time_based") ==
              ScheduleKind::TimeBased);
        CHECK(schedule_kind_from_name("step") == ScheduleKind::Step);
        CHECK(schedule_kind_from_name("exponential") ==
              ScheduleKind::Exponential);
        CHECK_THROWS_AS(schedule_kind_from_name("stop"), ParameterError);
        CHECK_THROWS_AS(lr_schedule(ScheduleKind::TimeBased, -1.0, 0, params),
                        ParameterError);
        CHECK_THROWS_AS(lr_schedule(ScheduleKind::TimeBased, 1.0, -1, params),
                        ParameterError);
    }
}

namespace {

// Two linearly separable clusters in 2D for emotions 0 and 3.
void separable_toy(Eigen::MatrixXd& x, std::vector<Emotion>& labels) {
    x.resize(20, 2);
    labels.clear();
    SplitMix64 rng(123);
    for (int i = 0; i < 20; ++i) {
        const bool first = i < 10;
        x(i, 0) = (first ? -2.0 : 2.0) + 0.5 * (rng.next_double() - 0.5);
        x(i, 1) = (first ? -1.0 : 1.0) + 0.5 * (rng.next_double() - 0.5);
        labels.push_back(first ? Emotion::Anger : Emotion::Happy);
    }
}

}  // namespace

TEST_CASE("baseline training") {
    Eigen::MatrixXd x;
    std::vector<Emotion> labels;
    separable_toy(x, labels);

    SUBCASE("zero-initialized weights predict uniformly") {
        BaselineModel fresh;
        fresh.weight = Eigen::MatrixXd::Zero(2, 7);
        const EmotionDistribution d =
            predict_baseline(fresh, Eigen::Vector2d(1.0, -1.0));
        for (int i = 0; i < 7; ++i) {
            CHECK(d.p(i) == doctest::Approx(1.0 / 7.0));
        }
    }
    SUBCASE("separable data reaches full training accuracy") {
        const TrainResult result = train_baseline(x, labels, 500);
        int correct = 0;
        for (int i = 0; i < 20; ++i) {
            const EmotionDistribution d =
                predict_baseline(result.model, x.row(i).transpose());
            correct += d.argmax() == labels[static_cast<std::size_t>(i)];
        }
        CHECK(correct == 20);
    }
    SUBCASE("loss never increases over any 10-epoch span") {
        const TrainResult result = train_baseline(x, labels, 300);
        for (std::size_t e = 10; e < result.loss_per_epoch.size(); ++e) {
            CHECK(result.loss_per_epoch[e] <=
                  result.loss_per_epoch[e - 10] + 1e-12);
        }
    }
    SUBCASE("training is deterministic") {
        const TrainResult a = train_baseline(x, labels, 50);
        const TrainResult b = train_baseline(x, labels, 50);
        CHECK((a.model.weight - b.model.weight).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.model.bias - b.model.bias).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("non-finite features are rejected") {
        Eigen::MatrixXd bad = x;
        bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(train_baseline(bad, labels, 10), ParameterError);
    }
}

TEST_CASE("baseline gradient matches central finite differences") {
    SplitMix64 rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(8));
        const int d = 2 + static_cast<int>(rng.next_below(5));
        Eigen::MatrixXd x(n, d);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) {
                x(i, j) = 2.0 * rng.next_double() - 1.0;
            }
        }
        std::vector<Emotion> labels;
        for (int i = 0; i < n; ++i) {
            labels.push_back(static_cast<Emotion>(rng.next_below(7)));
        }
        Eigen::VectorXd params =
            oracles::random_vector(rng, d * 7 + 7, 0.5);

        auto unpack = [d](const Eigen::VectorXd& p) {
            BaselineModel m;
            m.weight = Eigen::Map<const Eigen::MatrixXd>(p.data(), d, 7);
            m.bias = p.tail(7);
            return m;
        };
        const Eigen::VectorXd analytic =
            baseline_gradient(unpack(params), x, labels);
        const Eigen::VectorXd numeric = oracles::finite_difference_gradient(
            [&](const Eigen::VectorXd& p) {
                return baseline_loss(unpack(p), x, labels);
            },
            params);
        for (Eigen::Index i = 0; i < analytic.size(); ++i) {
            const double scale =
                std::max({1.0, std::abs(analytic(i)), std::abs(numeric(i))});
            CHECK(std::abs(analytic(i) - numeric(i)) / scale <= 1e-4);
        }
    }
}

TEST_CASE("baseline weights file round trip") {
    SplitMix64 rng(61);
    BaselineModel model;
    model.weight = Eigen::MatrixXd::Random(5, 7);
    model.bias = oracles::random_vector(rng, 7);
    const BaselineModel back = load_baseline(baseline_json(model));
    CHECK((back.weight - model.weight).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.bias - model.bias).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(load_baseline("{}"), DecodeError);
}

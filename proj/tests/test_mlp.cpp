#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nids/mlp.hpp"

using namespace nids;

namespace {

// test-local loss oracle: ReLU layers + softmax cross-entropy from scratch
double oracle_loss(const MlpModel &model, const Matrix &x, const std::vector<int> &y) {
    std::vector<std::vector<double>> act(x.rows);
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::vector<double> a(x.row(r).begin(), x.row(r).end());
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            std::vector<double> z(model.biases[l]);
            for (std::size_t j = 0; j < z.size(); ++j)
                for (std::size_t i = 0; i < a.size(); ++i)
                    z[j] += a[i] * model.weights[l](i, j);
            if (l + 1 < model.weights.size())
                for (double &v : z)
                    v = std::max(0.0, v);
            a = std::move(z);
        }
        double mx = a[0];
        for (double v : a)
            mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : a)
            sum += std::exp(v - mx);
        loss += mx + std::log(sum) - a[static_cast<std::size_t>(y[r])];
    }
    return loss / static_cast<double>(x.rows);
}

double fd_check(MlpModel &model, const Matrix &x, const std::vector<int> &y,
                std::span<double> params, std::span<const double> analytic) {
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = oracle_loss(model, x, y);
        params[i] = saved - h;
        const double down = oracle_loss(model, x, y);
        params[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel =
            std::abs(fd - analytic[i]) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
        worst = std::max(worst, rel);
    }
    return worst;
}

// 4-point XOR pattern replicated with noise
void make_xor(Matrix &x, std::vector<int> &y, std::size_t copies, Rng &rng) {
    const double pts[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const int labels[4] = {0, 1, 1, 0};
    x = Matrix(4 * copies, 2);
    y.resize(4 * copies);
    std::size_t r = 0;
    for (std::size_t c = 0; c < copies; ++c)
        for (std::size_t p = 0; p < 4; ++p, ++r) {
            x(r, 0) = pts[p][0] + rng.uniform(-0.05, 0.05);
            x(r, 1) = pts[p][1] + rng.uniform(-0.05, 0.05);
            y[r] = labels[p];
        }
}

} // namespace

TEST_CASE("mlp gradients match central finite differences on [4,3,3,2]") {
    Rng rng(81);
    const std::vector<std::size_t> hidden = {3, 3};
    MlpModel model = make_mlp(4, hidden, 2, rng);
    for (auto &b : model.biases)
        for (double &v : b)
            v = rng.uniform(-0.2, 0.2);

    Matrix x(5, 4);
    for (double &v : x.data)
        v = rng.uniform(-1.0, 1.0);
    const std::vector<int> y = {0, 1, 1, 0, 1};

    MlpGradients g = mlp_backprop(model, x, y, {});
    CHECK(g.loss == doctest::Approx(oracle_loss(model, x, y)).epsilon(1e-12));

    double worst = 0.0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        worst = std::max(worst, fd_check(model, x, y, model.weights[l].data, g.weights[l].data));
        worst = std::max(worst, fd_check(model, x, y, model.biases[l], g.biases[l]));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("relu backward zeroes gradients where the pre-activation is non-positive") {
    // single hidden layer, weights arranged so one hidden unit is strictly
    // negative for the probe input
    Rng rng(82);
    MlpModel model = make_mlp(2, std::vector<std::size_t>{2}, 2, rng);
    model.weights[0] = Matrix::from_rows({{1.0, -1.0}, {1.0, -1.0}});
    model.biases[0] = {0.0, 0.0};

    Matrix x = Matrix::from_rows({{0.5, 0.5}}); // unit 0 pre-act 1.0, unit 1 pre-act -1.0
    const std::vector<int> y = {0};
    MlpGradients g = mlp_backprop(model, x, y, {});
    // all first-layer gradients feeding the dead unit are exactly zero
    CHECK(g.weights[0](0, 1) == 0.0);
    CHECK(g.weights[0](1, 1) == 0.0);
    CHECK(g.biases[0][1] == 0.0);
    // the live unit has non-zero gradient
    CHECK(g.biases[0][0] != 0.0);
}

TEST_CASE("batch loss is invariant to within-batch sample permutation") {
    Rng rng(83);
    MlpModel model = make_mlp(3, std::vector<std::size_t>{4}, 3, rng);
    Matrix x(6, 3);
    for (double &v : x.data)
        v = rng.uniform(-1.0, 1.0);
    const std::vector<int> y = {0, 1, 2, 2, 1, 0};

    Matrix xp(6, 3);
    std::vector<int> yp(6);
    const std::size_t perm[6] = {4, 2, 0, 5, 1, 3};
    for (std::size_t r = 0; r < 6; ++r) {
        auto src = x.row(perm[r]);
        std::copy(src.begin(), src.end(), xp.row(r).begin());
        yp[r] = y[perm[r]];
    }
    CHECK(mlp_backprop(model, x, y, {}).loss ==
          doctest::Approx(mlp_backprop(model, xp, yp, {}).loss).epsilon(1e-12));
}

TEST_CASE("mlp_train: zero learning rate leaves parameters unchanged") {
    Rng data_rng(84);
    Matrix x(16, 3);
    for (double &v : x.data)
        v = data_rng.uniform(-1.0, 1.0);
    std::vector<int> y(16);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = static_cast<int>(i % 2);

    MlpTrainConfig cfg;
    cfg.hidden = {4};
    cfg.epochs = 3;
    cfg.learning_rate = 0.0;
    cfg.batch_size = 8;

    Rng r1(85), r2(85);
    MlpTrainResult trained = mlp_train(x, y, x, y, 2, cfg, r1);
    MlpModel reference = make_mlp(3, cfg.hidden, 2, r2);
    CHECK(bitwise_equal(trained.model.weights[0], reference.weights[0]));
    CHECK(bitwise_equal(trained.model.weights[1], reference.weights[1]));
}

TEST_CASE("mlp_train solves XOR") {
    Rng data_rng(86);
    Matrix x;
    std::vector<int> y;
    make_xor(x, y, 100, data_rng);

    MlpTrainConfig cfg;
    cfg.hidden = {8, 8};
    cfg.epochs = 60;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 32;
    cfg.momentum = 0.9;

    Rng rng(87);
    MlpTrainResult res = mlp_train(x, y, x, y, 2, cfg, rng);
    const auto pred = mlp_predict(res.model, x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == y[i])
            ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(pred.size()) > 0.95);
}

TEST_CASE("mlp_train rejects out-of-range labels; predict tie-breaks to class 0") {
    Matrix x(4, 2, 0.5);
    std::vector<int> bad = {0, 3, 1, 0};
    MlpTrainConfig cfg;
    Rng rng(88);
    CHECK_THROWS_AS(mlp_train(x, bad, x, bad, 2, cfg, rng), DataError);

    Rng mrng(89);
    MlpModel uniform = make_mlp(2, std::vector<std::size_t>{3}, 4, mrng);
    uniform.weights.back() = Matrix(3, 4, 0.0);
    uniform.biases.back().assign(4, 0.0);
    for (int c : mlp_predict(uniform, x))
        CHECK(c == 0);

    // argmax agrees with forward probabilities, and repeated calls agree
    Rng arng(90);
    MlpModel m = make_mlp(2, std::vector<std::size_t>{3}, 3, arng);
    Matrix probs = mlp_forward(m, x);
    auto pred = mlp_predict(m, x);
    for (std::size_t r = 0; r < probs.rows; ++r)
        for (std::size_t j = 0; j < probs.cols; ++j)
            CHECK(probs(r, j) <= probs(r, static_cast<std::size_t>(pred[r])));
    CHECK(pred == mlp_predict(m, x));
}

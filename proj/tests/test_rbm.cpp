#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nids/rbm.hpp"

using namespace nids;

namespace {

// ---- enumeration oracle, independent of the library implementation ----
// Everything below works in long double directly from the energy formula.

long double oracle_energy(const RbmParams &p, const std::vector<double> &v,
                          const std::vector<double> &h) {
    long double e = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i)
        e -= static_cast<long double>(p.vbias[i]) * v[i];
    for (std::size_t j = 0; j < h.size(); ++j)
        e -= static_cast<long double>(p.hbias[j]) * h[j];
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j)
            e -= v[i] * h[j] * static_cast<long double>(p.w(i, j));
    return e;
}

std::vector<double> bits(std::size_t value, std::size_t width) {
    std::vector<double> out(width);
    for (std::size_t i = 0; i < width; ++i)
        out[i] = (value >> i) & 1u ? 1.0 : 0.0;
    return out;
}

long double oracle_partition(const RbmParams &p) {
    const std::size_t nv = p.n_visible(), nh = p.n_hidden();
    long double z = 0.0L;
    for (std::size_t sv = 0; sv < (std::size_t(1) << nv); ++sv)
        for (std::size_t sh = 0; sh < (std::size_t(1) << nh); ++sh)
            z += expl(-oracle_energy(p, bits(sv, nv), bits(sh, nh)));
    return z;
}

long double oracle_marginal(const RbmParams &p, const std::vector<double> &v) {
    const std::size_t nh = p.n_hidden();
    long double sum = 0.0L;
    for (std::size_t sh = 0; sh < (std::size_t(1) << nh); ++sh)
        sum += expl(-oracle_energy(p, v, bits(sh, nh)));
    return sum / oracle_partition(p);
}

// p(h_j = 1 | v) by summing the joint over hidden states
long double oracle_hidden_conditional(const RbmParams &p, const std::vector<double> &v,
                                      std::size_t j) {
    const std::size_t nh = p.n_hidden();
    long double num = 0.0L, den = 0.0L;
    for (std::size_t sh = 0; sh < (std::size_t(1) << nh); ++sh) {
        const auto h = bits(sh, nh);
        const long double w = expl(-oracle_energy(p, v, h));
        den += w;
        if (h[j] == 1.0)
            num += w;
    }
    return num / den;
}

long double oracle_visible_conditional(const RbmParams &p, const std::vector<double> &h,
                                       std::size_t i) {
    const std::size_t nv = p.n_visible();
    long double num = 0.0L, den = 0.0L;
    for (std::size_t sv = 0; sv < (std::size_t(1) << nv); ++sv) {
        const auto v = bits(sv, nv);
        const long double w = expl(-oracle_energy(p, v, h));
        den += w;
        if (v[i] == 1.0)
            num += w;
    }
    return num / den;
}

// exact log-likelihood gradient for a binary dataset, flattened (W, b, c)
std::vector<double> oracle_exact_gradient(const RbmParams &p,
                                          const std::vector<std::vector<double>> &data) {
    const std::size_t nv = p.n_visible(), nh = p.n_hidden();
    std::vector<long double> grad(nv * nh + nv + nh, 0.0L);

    // data term: E_{h|v}[v h], v, p(h|v)
    for (const auto &v : data) {
        for (std::size_t j = 0; j < nh; ++j) {
            const long double ph = oracle_hidden_conditional(p, v, j);
            for (std::size_t i = 0; i < nv; ++i)
                grad[i * nh + j] += v[i] * ph;
            grad[nv * nh + nv + j] += ph;
        }
        for (std::size_t i = 0; i < nv; ++i)
            grad[nv * nh + i] += v[i];
    }
    for (auto &g : grad)
        g /= static_cast<long double>(data.size());

    // model term: expectation under the joint by enumeration
    const long double z = oracle_partition(p);
    for (std::size_t sv = 0; sv < (std::size_t(1) << nv); ++sv) {
        const auto v = bits(sv, nv);
        long double pv = 0.0L;
        for (std::size_t sh = 0; sh < (std::size_t(1) << nh); ++sh)
            pv += expl(-oracle_energy(p, v, bits(sh, nh)));
        pv /= z;
        for (std::size_t j = 0; j < nh; ++j) {
            const long double ph = oracle_hidden_conditional(p, v, j);
            for (std::size_t i = 0; i < nv; ++i)
                grad[i * nh + j] -= pv * v[i] * ph;
            grad[nv * nh + nv + j] -= pv * ph;
        }
        for (std::size_t i = 0; i < nv; ++i)
            grad[nv * nh + i] -= pv * v[i];
    }

    std::vector<double> out(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i)
        out[i] = static_cast<double>(grad[i]);
    return out;
}

RbmParams random_params(std::size_t nv, std::size_t nh, Rng &rng, double scale = 1.0) {
    RbmParams p;
    p.w = Matrix(nv, nh);
    for (double &v : p.w.data)
        v = rng.uniform(-scale, scale);
    p.vbias.resize(nv);
    p.hbias.resize(nh);
    for (double &v : p.vbias)
        v = rng.uniform(-scale, scale);
    for (double &v : p.hbias)
        v = rng.uniform(-scale, scale);
    return p;
}

RbmParams zero_params(std::size_t nv, std::size_t nh) {
    RbmParams p;
    p.w = Matrix(nv, nh, 0.0);
    p.vbias.assign(nv, 0.0);
    p.hbias.assign(nh, 0.0);
    return p;
}

std::vector<double> flatten(const RbmParams &p) {
    std::vector<double> out(p.w.data);
    out.insert(out.end(), p.vbias.begin(), p.vbias.end());
    out.insert(out.end(), p.hbias.begin(), p.hbias.end());
    return out;
}

double cosine(const std::vector<double> &a, const std::vector<double> &b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / std::sqrt(na * nb);
}

} // namespace

TEST_CASE("energy: zero configurations and single-unit value") {
    Rng rng(31);
    RbmParams p = random_params(3, 2, rng);
    const std::vector<double> v0(3, 0.0), h0(2, 0.0);
    CHECK(energy(p, v0, h0) == 0.0);

    RbmParams zero = zero_params(3, 2);
    const std::vector<double> v101 = {1, 0, 1}, h11 = {1, 1};
    CHECK(energy(zero, v101, h11) == 0.0);

    RbmParams single;
    single.w = Matrix::from_rows({{3.0}});
    single.vbias = {1.0};
    single.hbias = {2.0};
    const std::vector<double> one = {1.0};
    CHECK(energy(single, one, one) == doctest::Approx(-6.0));

    CHECK_THROWS_AS(energy(p, one, h11), ShapeError);
}

TEST_CASE("partition function: zero-parameter closed forms") {
    CHECK(partition_function(zero_params(2, 2)) == doctest::Approx(16.0).epsilon(1e-12));
    for (auto [a, b] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 2}, {4, 5}})
        CHECK(partition_function(zero_params(a, b)) ==
              doctest::Approx(std::pow(2.0, double(a + b))).epsilon(1e-12));
}

TEST_CASE("partition function matches the enumeration oracle") {
    Rng rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        RbmParams p = random_params(3, 3, rng);
        const double expect = static_cast<double>(oracle_partition(p));
        CHECK(partition_function(p) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("partition function enumeration guard") {
    CHECK_THROWS_AS(partition_function(zero_params(12, 9)), CapacityError);
    CHECK_THROWS_AS(marginal_v(zero_params(15, 6), std::vector<double>(15, 0.0)), CapacityError);
}

TEST_CASE("marginal_v: uniform case, normalisation, oracle match") {
    RbmParams zero = zero_params(2, 3);
    for (std::size_t s = 0; s < 4; ++s) {
        std::vector<double> v = {double(s & 1), double((s >> 1) & 1)};
        CHECK(marginal_v(zero, v) == doctest::Approx(0.25).epsilon(1e-12));
    }

    Rng rng(33);
    RbmParams p = random_params(4, 3, rng);
    double total = 0.0;
    for (std::size_t s = 0; s < 16; ++s) {
        std::vector<double> v(4);
        for (std::size_t i = 0; i < 4; ++i)
            v[i] = (s >> i) & 1u ? 1.0 : 0.0;
        const double got = marginal_v(p, v);
        CHECK(got == doctest::Approx(static_cast<double>(oracle_marginal(p, v))).epsilon(1e-9));
        total += got;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("prop_up / prop_down: trivial cases") {
    RbmParams zero = zero_params(3, 4);
    Matrix v(1, 3, 0.7);
    for (double p : prop_up(zero, v).data)
        CHECK(p == doctest::Approx(0.5));
    Matrix h(1, 4, 0.2);
    for (double p : prop_down(zero, h).data)
        CHECK(p == doctest::Approx(0.5));

    RbmParams single;
    single.w = Matrix::from_rows({{1.7}});
    single.vbias = {0.0};
    single.hbias = {0.0};
    CHECK(prop_up(single, Matrix(1, 1, 1.0))(0, 0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-1.7))));
    CHECK(prop_down(single, Matrix(1, 1, 1.0))(0, 0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-1.7))));

    CHECK_THROWS_AS(prop_up(zero, Matrix(1, 4)), ShapeError);
    CHECK_THROWS_AS(prop_down(zero, Matrix(1, 3)), ShapeError);
}

TEST_CASE("prop_up / prop_down equal the exact conditionals") {
    Rng rng(34);
    for (int trial = 0; trial < 4; ++trial) {
        RbmParams p = random_params(3, 3, rng);
        for (std::size_t sv = 0; sv < 8; ++sv) {
            std::vector<double> v = bits(sv, 3);
            Matrix vb(1, 3);
            std::copy(v.begin(), v.end(), vb.data.begin());
            Matrix up = prop_up(p, vb);
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(up(0, j) -
                               static_cast<double>(oracle_hidden_conditional(p, v, j))) < 1e-12);
        }
        for (std::size_t sh = 0; sh < 8; ++sh) {
            std::vector<double> h = bits(sh, 3);
            Matrix hb(1, 3);
            std::copy(h.begin(), h.end(), hb.data.begin());
            Matrix down = prop_down(p, hb);
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(std::abs(down(0, i) -
                               static_cast<double>(oracle_visible_conditional(p, h, i))) < 1e-12);
        }
    }
}

TEST_CASE("gibbs_chain: zero-parameter chain and determinism") {
    RbmParams zero = zero_params(3, 2);
    Matrix v0(4, 3, 0.25);
    Rng rng(35);
    GibbsResult res = gibbs_chain(zero, v0, 1, rng);
    for (double p : res.vk_probs.data)
        CHECK(p == doctest::Approx(0.5));
    for (double p : res.h0_probs.data)
        CHECK(p == doctest::Approx(0.5));

    Rng prng(37);
    RbmParams p = random_params(3, 2, prng);
    Rng r1(36), r1b(36), r2(36);
    GibbsResult a = gibbs_chain(p, v0, 5, r1);
    GibbsResult b = gibbs_chain(p, v0, 5, r1b);
    CHECK(bitwise_equal(a.vk_probs, b.vk_probs));
    CHECK(bitwise_equal(a.hk_probs, b.hk_probs));

    CHECK_THROWS_AS(gibbs_chain(p, v0, 0, r2), DomainError);
}

TEST_CASE("gibbs_chain batch of chains approaches the exact visible marginals") {
    Rng rng(38);
    RbmParams p = random_params(3, 2, rng, 0.8);

    const std::size_t chains = 20000;
    Matrix starts(chains, 3, 0.5);
    Rng start_rng(39);
    Matrix v0 = bernoulli_sample(starts, start_rng);

    Rng chain_rng(40);
    GibbsResult res = gibbs_chain(p, v0, 15, chain_rng);

    for (std::size_t i = 0; i < 3; ++i) {
        // exact P(v_i = 1) from the enumerated marginal
        long double exact = 0.0L;
        for (std::size_t sv = 0; sv < 8; ++sv) {
            const auto v = bits(sv, 3);
            if (v[i] == 1.0)
                exact += oracle_marginal(p, v);
        }
        double mean = 0.0;
        for (std::size_t r = 0; r < chains; ++r)
            mean += res.vk_probs(r, i);
        mean /= static_cast<double>(chains);
        CHECK(std::abs(mean - static_cast<double>(exact)) < 0.02);
    }
}

TEST_CASE("single long gibbs chain: empirical state frequencies match marginal_v") {
    Rng rng(41);
    RbmParams p = random_params(3, 2, rng, 0.8);

    const std::size_t steps = 60000;
    std::vector<std::size_t> counts(8, 0);
    Matrix v(1, 3, 0.0);
    Rng chain_rng(42);
    for (std::size_t s = 0; s < steps; ++s) {
        GibbsResult res = gibbs_chain(p, v, 1, chain_rng);
        v = bernoulli_sample(res.vk_probs, chain_rng);
        std::size_t state = 0;
        for (std::size_t i = 0; i < 3; ++i)
            if (v(0, i) == 1.0)
                state |= std::size_t(1) << i;
        counts[state] += 1;
    }
    for (std::size_t sv = 0; sv < 8; ++sv) {
        const double freq = static_cast<double>(counts[sv]) / static_cast<double>(steps);
        CHECK(std::abs(freq - marginal_v(p, bits(sv, 3))) < 0.02);
    }
}

TEST_CASE("cd_update: fixed point and zero learning rate") {
    // zero parameters: hidden probs are 0.5 whatever the input, and the
    // reconstruction of a 0.5 batch is exactly 0.5, so every update term
    // cancels
    RbmParams zero = zero_params(3, 2);
    CdVelocity vel = CdVelocity::zeros_like(zero);
    Matrix batch(4, 3, 0.5);
    CdConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.0;
    Rng rng(43);
    cd_update(zero, batch, cfg, vel, rng);
    for (double w : zero.w.data)
        CHECK(w == doctest::Approx(0.0));
    for (double b : zero.vbias)
        CHECK(b == doctest::Approx(0.0));
    for (double c : zero.hbias)
        CHECK(c == doctest::Approx(0.0));

    Rng prng(44);
    RbmParams p = random_params(4, 3, prng);
    RbmParams before = p;
    CdVelocity vel2 = CdVelocity::zeros_like(p);
    CdConfig zero_lr;
    zero_lr.learning_rate = 0.0;
    zero_lr.momentum = 0.9;
    Matrix data(5, 4, 0.3);
    Rng rng2(45);
    cd_update(p, data, zero_lr, vel2, rng2);
    CHECK(bitwise_equal(p.w, before.w));
    CHECK(p.vbias == before.vbias);
    CHECK(p.hbias == before.hbias);

    CHECK_THROWS_AS(cd_update(p, Matrix(0, 4), zero_lr, vel2, rng2), DomainError);
}

TEST_CASE("cd-1 updates correlate with the exact log-likelihood gradient") {
    // 3x2 RBM on a fixed 8-pattern dataset
    const std::vector<std::vector<double>> patterns = {
        {1, 0, 1}, {1, 0, 1}, {0, 1, 0}, {0, 1, 0}, {1, 1, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 1}};
    Matrix data(patterns.size(), 3);
    for (std::size_t r = 0; r < patterns.size(); ++r)
        std::copy(patterns[r].begin(), patterns[r].end(), data.row(r).begin());

    Rng prng(46);
    RbmParams p = random_params(3, 2, prng, 0.3);
    CdConfig cfg;
    cfg.gibbs_steps = 1;
    cfg.learning_rate = 0.05;
    cfg.momentum = 0.0;
    Rng rng(47);

    double cosine_sum = 0.0;
    const int steps = 200;
    for (int s = 0; s < steps; ++s) {
        const std::vector<double> exact = oracle_exact_gradient(p, patterns);
        const std::vector<double> before = flatten(p);
        CdVelocity vel = CdVelocity::zeros_like(p);
        cd_update(p, data, cfg, vel, rng);
        std::vector<double> delta = flatten(p);
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] -= before[i];
        cosine_sum += cosine(delta, exact);
    }
    CHECK(cosine_sum / steps > 0.5);
}

TEST_CASE("pretrain: convergence on a repeated pattern") {
    Matrix data(32, 6);
    const std::vector<double> pattern = {1, 0, 1, 0, 1, 0};
    for (std::size_t r = 0; r < data.rows; ++r)
        std::copy(pattern.begin(), pattern.end(), data.row(r).begin());

    Rng rng(48);
    RbmParams p = make_rbm(6, 4, rng);
    CdConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 0.5;
    cfg.momentum = 0.9;
    cfg.batch_size = 8;
    auto history = pretrain(p, data, cfg, rng);
    REQUIRE(history.size() == 200);
    CHECK(history.back() < 0.05);
    CHECK(history.back() < history.front());
}

TEST_CASE("pretrain: zero epochs, determinism, partial batches") {
    Rng prng(49);
    RbmParams p = random_params(5, 3, prng, 0.2);
    RbmParams before = p;
    CdConfig cfg;
    cfg.epochs = 0;
    Rng rng(50);
    auto history = pretrain(p, Matrix(10, 5, 0.5), cfg, rng);
    CHECK(history.empty());
    CHECK(bitwise_equal(p.w, before.w));

    // same seed and config twice -> bit-identical parameters
    Matrix data(130, 5);
    Rng drng(51);
    for (double &v : data.data)
        v = drng.next_double();
    CdConfig cfg2;
    cfg2.epochs = 3;
    cfg2.batch_size = 64; // 130 rows -> final batch of 2 is used
    RbmParams p1 = before, p2 = before;
    Rng r1(52), r2(52);
    auto h1 = pretrain(p1, data, cfg2, r1);
    auto h2 = pretrain(p2, data, cfg2, r2);
    CHECK(bitwise_equal(p1.w, p2.w));
    CHECK(p1.vbias == p2.vbias);
    CHECK(p1.hbias == p2.hbias);
    CHECK(h1 == h2);

    // fewer rows than one batch still trains
    RbmParams p3 = before;
    Rng r3(53);
    auto h3 = pretrain(p3, Matrix(10, 5, 0.5), cfg2, r3);
    CHECK(h3.size() == 3);
    CHECK_FALSE(bitwise_equal(p3.w, before.w));
}

TEST_CASE("eq. 2 identity: joint probabilities sum to one") {
    Rng rng(54);
    for (int trial = 0; trial < 3; ++trial) {
        RbmParams p = random_params(3, 3, rng);
        const double z = partition_function(p);
        long double total = 0.0L;
        for (std::size_t sv = 0; sv < 8; ++sv)
            for (std::size_t sh = 0; sh < 8; ++sh) {
                const double e =
                    energy(p, bits(sv, 3), bits(sh, 3));
                total += expl(static_cast<long double>(-e)) / z;
            }
        CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

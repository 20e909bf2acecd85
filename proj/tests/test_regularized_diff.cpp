#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "spdeinv/regularized_diff.hpp"

using namespace spdeinv;

namespace {

constexpr double pi = std::numbers::pi;

// Direct O(L^2) evaluation of c_j = (1/L) sum_k x_k e^{-2 pi i j k / L}.
std::complex<double> naive_mode(const std::vector<double>& x, long j) {
    const double L = static_cast<double>(x.size());
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * std::polar(1.0, -2.0 * pi * static_cast<double>(j) * k / L);
    return s / L;
}

DataSeries random_series(std::size_t L, std::uint64_t seed, double t0 = -1.0, double dt = 1.0 / 128) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(L);
    for (double& x : v) x = nd(gen);
    return DataSeries(t0, dt, std::move(v));
}

double l2(const DataSeries& s) {
    double a = 0.0;
    for (double x : s.values) a += x * x;
    return std::sqrt(a);
}

double max_diff(const DataSeries& a, const DataSeries& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

// 3N samples of f on [-T, 2T) with T = 1.
DataSeries on_period(int N, const std::function<double(double)>& f) {
    return sample_series(-1.0, 1.0 / N, static_cast<std::size_t>(3 * N), f);
}

}  // namespace

TEST_CASE("forward transform against the direct sum") {
    for (std::size_t L : {4u, 7u, 48u, 129u, 384u}) {
        const auto x = random_series(L, L);
        const auto s = forward_transform(x);
        CHECK(s.length() == L);
        CHECK(s.min_index() == -static_cast<long>(L / 2));
        CHECK(s.max_index() == static_cast<long>((L + 1) / 2) - 1);
        double worst = 0.0, scale = 0.0;
        for (long j = s.min_index(); j <= s.max_index(); ++j) {
            worst = std::max(worst, std::abs(s.mode(j) - naive_mode(x.values, j)));
            scale = std::max(scale, std::abs(s.mode(j)));
        }
        CHECK(worst <= 1e-12 * scale);
    }
}

TEST_CASE("pure modes") {
    const int N = 32;
    SUBCASE("constant") {
        const auto s = forward_transform(on_period(N, [](double) { return 2.5; }));
        CHECK(s.mode(0).real() == doctest::Approx(2.5).epsilon(1e-14));
        for (long j = s.min_index(); j <= s.max_index(); ++j)
            if (j != 0) CHECK(std::abs(s.mode(j)) <= 1e-14);
    }
    SUBCASE("first cosine") {
        const auto s = forward_transform(on_period(N, [](double t) { return std::cos(2.0 * pi * t / 3.0); }));
        double peak = std::max(std::abs(s.mode(1)), std::abs(s.mode(-1)));
        CHECK(std::abs(s.mode(1)) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(s.mode(-1)) == doctest::Approx(0.5).epsilon(1e-12));
        for (long j = s.min_index(); j <= s.max_index(); ++j)
            if (std::abs(j) != 1) CHECK(std::abs(s.mode(j)) <= 1e-12 * peak);
        CHECK(s.frequency(1) == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-15));
        CHECK(s.period() == doctest::Approx(3.0).epsilon(1e-15));
    }
}

TEST_CASE("Parseval, conjugate symmetry and round trip") {
    for (std::size_t L : {5u, 64u, 96u, 383u, 384u}) {
        const auto x = random_series(L, 100 + L);
        const auto s = forward_transform(x);
        double lhs = 0.0, rhs = 0.0;
        for (double v : x.values) lhs += v * v * x.dt;
        for (const auto& c : s.modes) rhs += std::norm(c) * s.period();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

        for (long j = 1; j <= s.max_index(); ++j) {
            if (-j < s.min_index()) continue;
            CHECK(std::abs(s.mode(-j) - std::conj(s.mode(j))) <= 1e-12 * std::abs(s.mode(j)) + 1e-15);
        }

        const auto back = inverse_transform(s);
        double err = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            err += std::norm(back[k] - x.values[k]);
            norm += x.values[k] * x.values[k];
        }
        CHECK(std::sqrt(err / norm) <= 1e-12);
    }
}

TEST_CASE("forward transform input checks") {
    CHECK_THROWS_AS(forward_transform(DataSeries(0.0, 1.0, {1.0, 2.0, 3.0})), InvalidInput);
    const std::vector<double> t = {0.0, 0.1, 0.2, 0.35, 0.4};
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK_THROWS_AS(forward_transform(t, v), InvalidInput);
    const std::vector<double> tu = {0.0, 0.1, 0.2, 0.3, 0.4};
    const auto a = forward_transform(tu, v);
    const auto b = forward_transform(DataSeries(0.0, 0.1, v));
    for (long j = a.min_index(); j <= a.max_index(); ++j) CHECK(a.mode(j) == b.mode(j));
}

TEST_CASE("unregularized spectral derivative is exact on resolved modes") {
    for (int N : {16, 64, 128}) {
        for (int k : {1, 3, 7}) {
            const double w = 2.0 * pi * k / 3.0;
            const auto s = forward_transform(on_period(N, [w](double t) { return std::sin(w * t); }));
            const auto d = tikhonov_derivative(s, 0.0);
            const auto exact = on_period(N, [w](double t) { return w * std::cos(w * t); });
            CHECK(max_diff(d, exact) <= 1e-10);
            CHECK(d.same_sampling(exact));
        }
    }
}

TEST_CASE("Tikhonov gain halves at mu * xi = 1") {
    const int N = 64;
    for (int k : {2, 5, 20}) {
        const double w = 2.0 * pi * k / 3.0;
        const auto s = forward_transform(on_period(N, [w](double t) { return std::cos(w * t); }));
        const auto d = tikhonov_derivative(s, 1.0 / w);
        const auto half = on_period(N, [w](double t) { return -0.5 * w * std::sin(w * t); });
        CHECK(max_diff(d, half) <= 1e-12 * w);
    }
}

TEST_CASE("cut-off filter limits") {
    const int N = 64;
    const auto x = random_series(static_cast<std::size_t>(3 * N), 9, -1.0, 1.0 / N);
    const auto s = forward_transform(x);
    const double nyquist = pi * N;

    SUBCASE("above Nyquist equals the unregularized derivative") {
        const auto plain = tikhonov_derivative(s, 0.0);
        for (double xm : {nyquist, 2.0 * nyquist}) CHECK(max_diff(cutoff_derivative(s, xm), plain) <= 1e-12 * l2(plain));
    }
    SUBCASE("below the lowest frequency everything vanishes") {
        const auto d = cutoff_derivative(s, 0.5 * s.frequency(1));
        for (double v : d.values) CHECK(std::abs(v) <= 1e-15);
    }
    SUBCASE("closed cut keeps the boundary mode") {
        const double w = s.frequency(4);
        const auto c = forward_transform(on_period(N, [w](double t) { return std::sin(w * t); }));
        const auto kept = cutoff_derivative(c, w);
        const auto exact = on_period(N, [w](double t) { return w * std::cos(w * t); });
        CHECK(max_diff(kept, exact) <= 1e-10);
        const auto dropped = cutoff_derivative(c, std::nextafter(w, 0.0));
        CHECK(l2(dropped) <= 1e-10);
    }
}

TEST_CASE("filter error bound factors") {
    CHECK(filter_error_bound(2.0, FilterSpec::cutoff(10.0)) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(filter_error_bound(2.0, FilterSpec::tikhonov(0.5)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(filter_error_bound(2.0, FilterSpec::tikhonov(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(filter_error_bound(1.0, FilterSpec::tikhonov(0.5)), InvalidInput);
    CHECK_THROWS_AS(filter_error_bound(0.5, FilterSpec::cutoff(3.0)), InvalidInput);
}

TEST_CASE("Tikhonov symbol bound by enumeration over grid frequencies") {
    const int N = 128;
    const auto s = forward_transform(on_period(N, [](double) { return 0.0; }));
    for (double mu : {0.001, 0.01, 0.03, 0.1, 1.0}) {
        double worst = 0.0;
        for (long j = s.min_index(); j <= s.max_index(); ++j) worst = std::max(worst, tikhonov_error_symbol(mu, s.frequency(j), 2.0));
        CHECK(worst <= std::max(mu, 1.0 / mu));
    }
}

TEST_CASE("filters are linear and real") {
    const int N = 64;
    const auto x = random_series(static_cast<std::size_t>(3 * N), 21, -1.0, 1.0 / N);
    const auto y = random_series(static_cast<std::size_t>(3 * N), 22, -1.0, 1.0 / N);
    DataSeries comb = x;
    for (std::size_t i = 0; i < comb.size(); ++i) comb.values[i] = 1.5 * x.values[i] - 0.25 * y.values[i];
    for (const auto& f : {FilterSpec::tikhonov(0.03), FilterSpec::cutoff(30.0)}) {
        const auto dx = regularized_derivative(forward_transform(x), f);
        const auto dy = regularized_derivative(forward_transform(y), f);
        const auto dc = regularized_derivative(forward_transform(comb), f);
        double worst = 0.0;
        for (std::size_t i = 0; i < dc.size(); ++i)
            worst = std::max(worst, std::abs(dc.values[i] - (1.5 * dx.values[i] - 0.25 * dy.values[i])));
        CHECK(worst <= 1e-12 * l2(dc));

        // Imaginary part of the filtered inverse is round-off only.
        Spectrum sp = forward_transform(x);
        for (long j = sp.min_index(); j <= sp.max_index(); ++j) {
            if (sp.length() % 2 == 0 && j == sp.min_index()) {
                sp.mode(j) = 0.0;
                continue;
            }
            const double xi = sp.frequency(j);
            const double g = f.kind == DiffMethod::tikhonov ? 1.0 / (1.0 + f.mu * f.mu * xi * xi)
                                                            : (std::abs(xi) <= f.xi_max ? 1.0 : 0.0);
            sp.mode(j) *= std::complex<double>(0.0, xi) * g;
        }
        double imag = 0.0, real = 0.0;
        for (const auto& c : inverse_transform(sp)) {
            imag = std::max(imag, std::abs(c.imag()));
            real = std::max(real, std::abs(c.real()));
        }
        CHECK(imag <= 1e-12 * real);
    }
}

TEST_CASE("regularization is monotone in its parameter") {
    const int N = 128;
    const auto x = random_series(static_cast<std::size_t>(3 * N), 33, -1.0, 1.0 / N);
    const auto s = forward_transform(x);
    double prev = l2(tikhonov_derivative(s, 0.0));
    for (double mu : {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0}) {
        const double cur = l2(tikhonov_derivative(s, mu));
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
    prev = 0.0;
    for (double xm : {1.0, 5.0, 10.0, 30.0, 70.0, 200.0, 500.0}) {
        const double cur = l2(cutoff_derivative(s, xm));
        CHECK(cur >= prev * (1.0 - 1e-12));
        prev = cur;
    }
}

TEST_CASE("filter spec validation") {
    CHECK_THROWS_AS(FilterSpec::tikhonov(-1.0), InvalidInput);
    CHECK_THROWS_AS(FilterSpec::cutoff(0.0), InvalidInput);
    const auto s = forward_transform(on_period(16, [](double t) { return t; }));
    CHECK_THROWS_AS(tikhonov_derivative(s, -0.1), InvalidInput);
    CHECK_THROWS_AS(cutoff_derivative(s, -1.0), InvalidInput);
}

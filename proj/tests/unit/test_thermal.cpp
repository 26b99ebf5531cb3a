#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ldedq/errors.hpp"
#include "ldedq/thermal.hpp"
#include "support.hpp"

using namespace ldedq;

namespace {

// Straight transcription of the moving Gaussian source integral in the original
// time variable, left to tanh-sinh to cope with the endpoint singularity.
double reference_temperature(const MaterialEnv& m, const LaserQuery& q) {
    using std::numbers::pi;
    const double a = m.diffusivity;
    const double s2 = m.sigma_l * m.sigma_l;
    auto f = [&](double tp) {
        const double d = q.t - tp;
        if (d <= 0.0) return 0.0;
        const double dx = q.x - q.speed_mps * tp;
        const double e = -(dx * dx + q.y * q.y) / (4.0 * a * d + 2.0 * s2) - q.z * q.z / (4.0 * a * d);
        return std::pow(d, -0.5) / (2.0 * a * d + s2) * std::exp(e);
    };
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    const double integral = integrator.integrate(f, 0.0, q.t, 1e-12);
    return m.t0_k + m.absorptivity * q.power_w / (pi * m.rho * m.cp * std::sqrt(4.0 * pi * a)) * integral;
}

double conductivity(const MaterialEnv& m) { return m.diffusivity * m.rho * m.cp; }

// Steady point source: T - T0 <= aP / (2 pi k R) with R >= z below the surface, and a
// Gaussian source is an average of point sources, so no depth can exceed this.
double point_source_depth_bound_mm(const MaterialEnv& m, double power_w) {
    return m.absorptivity * power_w / (2.0 * std::numbers::pi * conductivity(m) * (m.t_liq_k - m.t0_k)) * 1e3;
}

const double v400 = mmpm_to_mps(400.0);
const double v700 = mmpm_to_mps(700.0);

}  // namespace

TEST(Temperature, AmbientAtTimeZero) {
    const MaterialEnv m;
    for (const double p : {0.0, 500.0, 1000.0}) {
        EXPECT_EQ(temperature(m, {p, v400, 0.0, 0.0, 0.0, 0.0}), m.t0_k);
        EXPECT_EQ(temperature(m, {p, v400, 1e-3, 2e-4, 3e-4, 0.0}), m.t0_k);
    }
}

TEST(Temperature, AmbientWithoutPower) {
    const MaterialEnv m;
    EXPECT_EQ(temperature(m, {0.0, v400, 0.0, 0.0, 0.0, 1.0}), m.t0_k);
    EXPECT_EQ(temperature(m, {0.0, v700, 5e-3, 0.0, 1e-4, 1.0}), m.t0_k);
}

TEST(Temperature, RiseIsLinearInPower) {
    const MaterialEnv m;
    for (const double z : {0.0, 2e-4, 8e-4}) {
        const LaserQuery base{1.0, v400, 12e-3, 1e-4, z, 2.0};
        const double unit = unit_power_rise(m, base);
        for (const double p : {100.0, 500.0, 1000.0}) {
            LaserQuery q = base;
            q.power_w = p;
            EXPECT_NEAR(temperature(m, q) - m.t0_k, p * unit, 1e-12 * p * unit);
        }
        LaserQuery half = base, full = base;
        half.power_w = 500.0;
        full.power_w = 1000.0;
        EXPECT_NEAR(temperature(m, full) - m.t0_k, 2.0 * (temperature(m, half) - m.t0_k), 1e-9);
    }
}

TEST(Temperature, MatchesIndependentQuadrature) {
    const MaterialEnv m;
    const std::vector<LaserQuery> queries = {
        {1000.0, v400, 13.0e-3, 0.0, 0.0, 2.0},     // just behind the beam
        {1000.0, v400, 13.3e-3, 0.0, 0.0, 2.0},     // under the beam centre
        {1000.0, v400, 12.8e-3, 0.0, 1.0e-3, 2.0},  // near the melt boundary
        {500.0, v700, 22.9e-3, 2.0e-4, 4.0e-4, 2.0},
        {800.0, v700, 5.0e-3, 0.0, 2.0e-4, 0.5},
        {900.0, v400, 1.0e-3, 1.0e-3, 0.0, 0.01},   // shortly after switch-on
    };
    for (const LaserQuery& q : queries) {
        const double ours = temperature(m, q);
        const double ref = reference_temperature(m, q);
        EXPECT_NEAR(ours - m.t0_k, ref - m.t0_k, 1e-6 * (ref - m.t0_k)) << "x=" << q.x << " z=" << q.z;
    }
}

TEST(Temperature, SelfConvergesOnNodeDoubling) {
    const MaterialEnv m;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> power(100.0, 1000.0), speed(400.0, 700.0), behind(-3e-3, 1e-3),
        y(0.0, 1e-3), z(0.0, 1.5e-3), t(0.05, 4.0);
    QuadratureOptions coarse;
    QuadratureOptions fine;
    fine.initial_panels = 2 * coarse.initial_panels;
    fine.rel_tol = coarse.rel_tol / 100.0;
    for (int k = 0; k < 20; ++k) {
        LaserQuery q;
        q.power_w = power(gen);
        q.speed_mps = mmpm_to_mps(speed(gen));
        q.t = t(gen);
        q.x = q.speed_mps * q.t + behind(gen);
        q.y = y(gen);
        q.z = z(gen);
        const double a = temperature(m, q, coarse);
        const double b = temperature(m, q, fine);
        EXPECT_LT(std::abs(a - b) / b, 1e-5) << "query " << k;
    }
}

TEST(Temperature, RejectsInvalidQueries) {
    const MaterialEnv m;
    EXPECT_THROW(temperature(m, {-1.0, v400, 0, 0, 0, 1}), ValidationError);
    EXPECT_THROW(temperature(m, {100.0, v400, 0, 0, -1e-3, 1}), ValidationError);
    EXPECT_THROW(temperature(m, {100.0, v400, 0, 0, 0, -1}), ValidationError);
    EXPECT_THROW(temperature(m, {100.0, v400, NAN, 0, 0, 1}), ValidationError);
    try {
        temperature(m, {-5.0, v400, 0, 0, 0, 1});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("power"), std::string::npos);
    }
}

TEST(Temperature, NonFiniteIntegralIsReported) {
    MaterialEnv m;
    m.cp = 0.0;
    try {
        temperature(m, {1000.0, v400, 1e-3, 0, 0, 1.0});
        FAIL() << "expected a divergence error";
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("quadrature divergence"), std::string::npos);
    }
}

TEST(Material, ValidationNamesTheField) {
    MaterialEnv m;
    m.absorptivity = 1.5;
    try {
        m.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("material.absorptivity"), std::string::npos);
    }
    m = MaterialEnv{};
    m.t_liq_k = 200.0;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(MeltPoolDepth, MeasuredAnchors) {
    const MaterialEnv m;
    const DepthResult deep = melt_pool_depth(m, 1000.0, v400);
    const DepthResult shallow = melt_pool_depth(m, 500.0, v700);
    ASSERT_TRUE(deep.converged);
    ASSERT_TRUE(shallow.converged);
    EXPECT_NEAR(deep.depth_mm, 1.262, 0.1);
    EXPECT_NEAR(shallow.depth_mm, 0.506, 0.1);
    // The calibrated constants hit both anchors far inside that band.
    EXPECT_NEAR(deep.depth_mm, 1.262, 0.005);
    EXPECT_NEAR(shallow.depth_mm, 0.506, 0.005);
}

TEST(MeltPoolDepth, NoPowerNoPool) {
    const MaterialEnv m;
    for (const double v : {400.0, 500.0, 700.0}) {
        const DepthResult d = melt_pool_depth(m, 0.0, mmpm_to_mps(v));
        EXPECT_EQ(d.depth_mm, 0.0);
        EXPECT_TRUE(d.converged);
    }
}

TEST(MeltPoolDepth, TabulatedConstantsNeverMelt) {
    const MaterialEnv nominal = MaterialEnv::ss316l_nominal();
    EXPECT_DOUBLE_EQ(nominal.absorptivity, 0.3);
    EXPECT_DOUBLE_EQ(nominal.sigma_l, 0.918e-3);
    // Even a point source with 30 % absorption cannot melt 1.262 mm deep at 1000 W.
    EXPECT_LT(point_source_depth_bound_mm(nominal, 1000.0), 1.0);
    // The 0.918 mm Gaussian keeps the surface below the liquidus.
    const DepthResult d = melt_pool_depth(nominal, 1000.0, v400);
    EXPECT_TRUE(d.converged);
    EXPECT_EQ(d.depth_mm, 0.0);
}

TEST(MeltPoolDepth, BelowPointSourceBound) {
    DepthCache& cache = ldedq::testing::default_cache();
    const StateGrid& g = cache.grid();
    for (std::size_t id = 0; id < g.state_count(); ++id) {
        const StateId s = StateId::from_flat(g, id);
        const double bound = point_source_depth_bound_mm(cache.material(), state_params(g, s).power_w);
        EXPECT_LT(cache.get(s).depth_mm, bound);
    }
}

TEST(MeltPoolDepth, MonotoneOverDefaultGrid) {
    DepthCache& cache = ldedq::testing::default_cache();
    const int n = cache.grid().n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = cache.get({i, j}).depth_mm;
            EXPECT_TRUE(cache.get({i, j}).converged);
            if (i + 1 < n) EXPECT_LE(d, cache.get({i + 1, j}).depth_mm) << "power step at " << i << "," << j;
            if (j + 1 < n) EXPECT_GE(d, cache.get({i, j + 1}).depth_mm) << "speed step at " << i << "," << j;
        }
    }
}

TEST(MeltPoolDepth, BoundaryIsAtLiquidus) {
    DepthCache& cache = ldedq::testing::default_cache();
    const MaterialEnv& m = cache.material();
    const StateGrid& g = cache.grid();
    for (std::size_t id = 0; id < g.state_count(); id += 7) {
        const StateId s = StateId::from_flat(g, id);
        const ProcessParams p = state_params(g, s);
        const DepthResult& d = cache.get(s);
        ASSERT_GT(d.depth_mm, 0.0);
        const LaserQuery q{p.power_w, mmpm_to_mps(p.speed_mmpm), d.x_at_max, 0.0, d.depth_mm * 1e-3, d.t_used_s};
        EXPECT_NEAR(temperature(m, q), m.t_liq_k, 0.5) << "state " << id;
    }
}

TEST(MeltPoolDepth, Deterministic) {
    const MaterialEnv m;
    const DepthResult a = melt_pool_depth(m, 888.8888888888889, mmpm_to_mps(566.6666666666666));
    const DepthResult b = melt_pool_depth(m, 888.8888888888889, mmpm_to_mps(566.6666666666666));
    EXPECT_EQ(a, b);
    const LaserQuery q{750.0, v400, 10e-3, 1e-4, 3e-4, 1.7};
    EXPECT_EQ(temperature(m, q), temperature(m, q));
}

TEST(MeltPoolDepth, ReportsNonSteadyState) {
    const MaterialEnv m;
    DepthOptions opts;
    opts.max_extensions = 0;
    const DepthResult d = melt_pool_depth(m, 1000.0, v400, opts);
    EXPECT_FALSE(d.converged);
    EXPECT_GT(d.depth_mm, 0.0);
}

TEST(BatchDepths, EmptyBatch) {
    EXPECT_TRUE(batch_depths(MaterialEnv{}, {}).empty());
}

TEST(BatchDepths, SingletonMatchesSingleCall) {
    const MaterialEnv m;
    const std::vector<ProcessPoint> q = {{1000.0, v400}};
    const auto out = batch_depths(m, q);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0], melt_pool_depth(m, 1000.0, v400));
}

TEST(BatchDepths, OrderAndJobsIndependent) {
    const MaterialEnv m;
    std::vector<ProcessPoint> q = {{600.0, v400}, {700.0, v700}, {950.0, mmpm_to_mps(500.0)}, {0.0, v400}};
    const auto forward = batch_depths(m, q, {}, 1);
    const auto threaded = batch_depths(m, q, {}, 4);
    EXPECT_EQ(forward, threaded);
    std::reverse(q.begin(), q.end());
    auto backward = batch_depths(m, q, {}, 2);
    std::reverse(backward.begin(), backward.end());
    EXPECT_EQ(forward, backward);
}

TEST(BatchDepths, ErrorCarriesIndex) {
    const std::vector<ProcessPoint> q = {{600.0, v400}, {700.0, v700}, {-3.0, v400}};
    try {
        batch_depths(MaterialEnv{}, q, {}, 2);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("query 2"), std::string::npos) << e.what();
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "trajadv/core/rng.hpp"
#include "trajadv/core/synthetic.hpp"
#include "trajadv/core/types.hpp"
#include "trajadv/metrics/metrics.hpp"
#include "trajadv/pred/builtin.hpp"
#include "trajadv/pred/surrogate.hpp"

using namespace trajadv;
using core::Vec2;

namespace {

pred::PredictionRequest straight_request(int history_len = 4, int future_len = 12) {
    pred::PredictionRequest req;
    req.dt = 0.5;
    req.history_len = history_len;
    req.future_len = future_len;
    req.agent_ids = {"adv", "other"};
    req.adversary = 0;
    std::vector<Vec2> adv, other;
    for (int i = 0; i < history_len; ++i) {
        adv.push_back({static_cast<double>(i), 0.0});
        other.push_back({static_cast<double>(i), 3.5});
    }
    req.histories = {adv, other};
    return req;
}

std::vector<Vec2> random_history(std::mt19937_64& rng, int n) {
    std::vector<Vec2> h;
    Vec2 p{core::uniform(rng, -5, 5), core::uniform(rng, -5, 5)};
    for (int i = 0; i < n; ++i) {
        h.push_back(p);
        p += Vec2{core::uniform(rng, -2, 2), core::uniform(rng, -2, 2)};
    }
    return h;
}

// Central finite differences of loss_rmse(predicted adversary future, truth)
// with respect to the adversary history, the independent gradient oracle.
std::vector<Vec2> fd_gradient(const pred::Predictor& model, pred::PredictionRequest req,
                              const std::vector<Vec2>& truth, double h = 1e-4) {
    std::vector<Vec2> grad(req.histories[req.adversary].size());
    auto loss_at = [&]() {
        const auto out = model.predict(req);
        return pred::loss_rmse(out.futures[req.adversary], truth);
    };
    for (std::size_t k = 0; k < grad.size(); ++k) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? req.histories[req.adversary][k].x
                                      : req.histories[req.adversary][k].y;
            const double saved = coord;
            coord = saved + h;
            const double up = loss_at();
            coord = saved - h;
            const double down = loss_at();
            coord = saved;
            (axis == 0 ? grad[k].x : grad[k].y) = (up - down) / (2 * h);
        }
    }
    return grad;
}

double rel_err(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]).norm_sq();
        den += b[i].norm_sq();
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<core::Scenario> straight_suite(int count, std::uint64_t seed) {
    core::GeneratorConfig cfg;
    cfg.straight_count = count;
    return core::generate_synthetic_scenarios(cfg, seed);
}

std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("trajadv_pred_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("make_request extracts the observation window") {
    core::GeneratorConfig cfg;
    cfg.straight_count = 1;
    cfg.extra_leading_states = 2;
    const auto sc = core::generate_synthetic_scenarios(cfg, 3).front();
    const auto req = pred::make_request(sc);
    CHECK_EQ(req.history_len, sc.history_len);
    CHECK_EQ(req.future_len, sc.future_len);
    CHECK_EQ(req.dt, sc.dt);
    REQUIRE_EQ(req.histories.size(), sc.agents.size());
    const int adv = sc.adversary_index();
    CHECK_EQ(req.agent_ids[req.adversary], sc.adversary_id);
    const auto hist = sc.history_of(adv);
    for (int k = 0; k < sc.history_len; ++k) {
        CHECK_EQ(req.histories[req.adversary][k], hist[k].position());
    }
}

TEST_CASE("request validation rejects malformed inputs") {
    auto req = straight_request();
    CHECK_NOTHROW(pred::validate(req));
    SUBCASE("history length mismatch") {
        req.histories[0].pop_back();
        CHECK_THROWS_AS(pred::validate(req), core::ValidationError);
    }
    SUBCASE("adversary index out of range") {
        req.adversary = 5;
        CHECK_THROWS_AS(pred::validate(req), core::ValidationError);
    }
    SUBCASE("no agents") {
        req.agent_ids.clear();
        req.histories.clear();
        CHECK_THROWS_AS(pred::validate(req), core::ValidationError);
    }
}

TEST_CASE("constant-velocity predictor extrapolates linearly") {
    const pred::ConstantVelocityPredictor cv;
    const auto req = straight_request();
    const auto out = cv.predict(req);
    REQUIRE_EQ(out.futures.size(), 2);
    REQUIRE_EQ(out.futures[0].size(), 12);
    // history (0,0),(1,0),(2,0),(3,0) at dt=0.5: v=2 m/s, future spacing 1.0
    for (int k = 0; k < 12; ++k) {
        CHECK_EQ(out.futures[0][k].x, doctest::Approx(4.0 + k).epsilon(1e-12));
        CHECK_EQ(out.futures[0][k].y, doctest::Approx(0.0));
    }
}

TEST_CASE("constant-velocity predictor is stationary on stationary input") {
    const pred::ConstantVelocityPredictor cv;
    auto req = straight_request();
    for (auto& p : req.histories[0]) p = {2.5, -1.0};
    const auto out = cv.predict(req);
    for (const auto& p : out.futures[0]) {
        CHECK_EQ(p.x, doctest::Approx(2.5));
        CHECK_EQ(p.y, doctest::Approx(-1.0));
    }
}

TEST_CASE("builtin predictors are translation-equivariant") {
    const pred::ConstantVelocityPredictor cv;
    const pred::PolynomialPredictor poly;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        auto req = straight_request();
        for (auto& h : req.histories) h = random_history(rng, req.history_len);
        const Vec2 shift{core::uniform(rng, -20, 20), core::uniform(rng, -20, 20)};
        auto shifted = req;
        for (auto& h : shifted.histories) {
            for (auto& p : h) p += shift;
        }
        for (const pred::Predictor* model :
             {static_cast<const pred::Predictor*>(&cv), static_cast<const pred::Predictor*>(&poly)}) {
            const auto base = model->predict(req);
            const auto moved = model->predict(shifted);
            for (std::size_t a = 0; a < base.futures.size(); ++a) {
                for (std::size_t k = 0; k < base.futures[a].size(); ++k) {
                    const Vec2 expect = base.futures[a][k] + shift;
                    CHECK_EQ(moved.futures[a][k].x, doctest::Approx(expect.x).epsilon(1e-12));
                    CHECK_EQ(moved.futures[a][k].y, doctest::Approx(expect.y).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("polynomial predictor continues a quadratic path") {
    const pred::PolynomialPredictor poly(2);
    auto req = straight_request(5, 10);
    // x(t) = 0.3 t^2 - t + 2, y(t) = -0.2 t^2 + 0.5 t, t in steps
    auto fx = [](double t) { return 0.3 * t * t - t + 2.0; };
    auto fy = [](double t) { return -0.2 * t * t + 0.5 * t; };
    for (int i = 0; i < 5; ++i) req.histories[0][i] = {fx(i), fy(i)};
    const auto out = poly.predict(req);
    for (int k = 0; k < 10; ++k) {
        const double t = 5.0 + k;
        CHECK_EQ(out.futures[0][k].x, doctest::Approx(fx(t)).epsilon(1e-6));
        CHECK_EQ(out.futures[0][k].y, doctest::Approx(fy(t)).epsilon(1e-6));
    }
}

TEST_CASE("polynomial extrapolation matrix rows sum to one") {
    const pred::PolynomialPredictor poly(2);
    const auto m = poly.extrapolation_matrix(4, 12);
    REQUIRE_EQ(m.size(), 4u * 12u);
    for (int r = 0; r < 12; ++r) {
        double sum = 0.0;
        for (int c = 0; c < 4; ++c) sum += m[static_cast<std::size_t>(r) * 4 + c];
        CHECK_EQ(sum, doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("polynomial degree is capped by the window length") {
    // history of 2 points cannot support a quadratic: falls back to linear,
    // which continues a line exactly
    const pred::PolynomialPredictor poly(2);
    auto req = straight_request(2, 5);
    req.histories[0] = {{0, 0}, {1, 1}};
    const auto out = poly.predict(req);
    for (int k = 0; k < 5; ++k) {
        CHECK_EQ(out.futures[0][k].x, doctest::Approx(2.0 + k).epsilon(1e-9));
        CHECK_EQ(out.futures[0][k].y, doctest::Approx(2.0 + k).epsilon(1e-9));
    }
}

TEST_CASE("loss_rmse basics and brute-force agreement") {
    const std::vector<Vec2> a{{0, 0}, {1, 0}, {2, 0}};
    CHECK_EQ(pred::loss_rmse(a, a), 0.0);
    std::vector<Vec2> b;
    for (const auto& p : a) b.push_back(p + Vec2{3, 4});
    CHECK_EQ(pred::loss_rmse(b, a), doctest::Approx(5.0).epsilon(1e-12));
    CHECK_THROWS_AS(pred::loss_rmse(a, std::vector<Vec2>{{0, 0}}), core::ValidationError);

    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_history(rng, 12);
        const auto q = random_history(rng, 12);
        double acc = 0.0;
        for (int i = 0; i < 12; ++i) acc += (p[i] - q[i]).norm_sq();
        CHECK_EQ(pred::loss_rmse(p, q), doctest::Approx(std::sqrt(acc / 12)).epsilon(1e-12));
    }
}

TEST_CASE("loss_rmse_grad matches finite differences and is zero at the minimum") {
    std::mt19937_64 rng(37);
    const auto truth = random_history(rng, 8);
    auto pred_pts = random_history(rng, 8);
    const auto grad = pred::loss_rmse_grad(pred_pts, truth);
    const double h = 1e-7;
    for (int k = 0; k < 8; ++k) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? pred_pts[k].x : pred_pts[k].y;
            const double saved = coord;
            coord = saved + h;
            const double up = pred::loss_rmse(pred_pts, truth);
            coord = saved - h;
            const double down = pred::loss_rmse(pred_pts, truth);
            coord = saved;
            const double fd = (up - down) / (2 * h);
            CHECK_EQ(axis == 0 ? grad[k].x : grad[k].y, doctest::Approx(fd).epsilon(1e-5));
        }
    }
    const auto zero = pred::loss_rmse_grad(truth, truth);
    for (const auto& g : zero) CHECK_EQ(g.norm(), 0.0);
}

TEST_CASE("exact gradients match central finite differences") {
    const pred::ConstantVelocityPredictor cv;
    const pred::PolynomialPredictor poly(2);
    pred::NeuralSurrogate net(4, 12, 8, 2, /*seed=*/123);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        auto req = straight_request();
        for (auto& h : req.histories) h = random_history(rng, req.history_len);
        const auto truth = random_history(rng, req.future_len);
        for (const pred::Predictor* model :
             {static_cast<const pred::Predictor*>(&cv), static_cast<const pred::Predictor*>(&poly),
              static_cast<const pred::Predictor*>(&net)}) {
            REQUIRE(model->has_exact_gradient());
            const auto exact =
                pred::grad_adversary_history(*model, req, truth, pred::GradientMode::exact);
            const auto fd = fd_gradient(*model, req, truth);
            CHECK(rel_err(exact, fd) <= 1e-3);
        }
    }
}

TEST_CASE("finite-difference mode reproduces the exact gradient") {
    const pred::ConstantVelocityPredictor cv;
    std::mt19937_64 rng(43);
    auto req = straight_request();
    for (auto& h : req.histories) h = random_history(rng, req.history_len);
    const auto truth = random_history(rng, req.future_len);
    const auto exact = pred::grad_adversary_history(cv, req, truth, pred::GradientMode::exact);
    const auto fd =
        pred::grad_adversary_history(cv, req, truth, pred::GradientMode::finite_difference);
    CHECK(rel_err(fd, exact) <= 1e-3);
}

TEST_CASE("constant-velocity gradient flows only through the endpoint states") {
    const pred::ConstantVelocityPredictor cv;
    std::mt19937_64 rng(47);
    auto req = straight_request(6, 8);
    req.histories[0] = random_history(rng, 6);
    req.histories[1] = random_history(rng, 6);
    const auto truth = random_history(rng, 8);
    const auto grad = pred::grad_adversary_history(cv, req, truth);
    REQUIRE_EQ(grad.size(), 6);
    // the extrapolation reads only the first and last history points
    CHECK(grad[0].norm() > 0.0);
    CHECK(grad[5].norm() > 0.0);
    for (int k = 1; k < 5; ++k) CHECK_EQ(grad[k].norm(), 0.0);
}

TEST_CASE("gradient vanishes where the loss is zero") {
    const pred::ConstantVelocityPredictor cv;
    const auto req = straight_request();
    const auto out = cv.predict(req);
    const auto grad = pred::grad_adversary_history(cv, req, out.futures[req.adversary]);
    for (const auto& g : grad) CHECK(g.norm() <= 1e-6);
}

TEST_CASE("surrogate training is deterministic in the seed") {
    const auto data = straight_suite(12, 71);
    pred::SurrogateHyperparams hp;
    hp.hidden = 8;
    hp.epochs = 300;
    const auto dir = fresh_dir("det");
    pred::TrainingReport rep_a, rep_b;
    const auto a = pred::train_tiny_surrogate(data, hp, 9, &rep_a);
    const auto b = pred::train_tiny_surrogate(data, hp, 9, &rep_b);
    a.save_params(dir / "a.json");
    b.save_params(dir / "b.json");
    std::ifstream fa(dir / "a.json"), fb(dir / "b.json");
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK_EQ(sa, sb);
    CHECK_EQ(rep_a.final_mse, rep_b.final_mse);
    CHECK_EQ(rep_a.epochs_run, 300);
    CHECK(!rep_a.diverged);
    // a different seed gives different parameters
    const auto c = pred::train_tiny_surrogate(data, hp, 10);
    c.save_params(dir / "c.json");
    std::ifstream fc(dir / "c.json");
    std::string sc((std::istreambuf_iterator<char>(fc)), std::istreambuf_iterator<char>());
    CHECK_NE(sa, sc);
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero-epoch training returns a usable initialized model") {
    const auto data = straight_suite(4, 73);
    pred::SurrogateHyperparams hp;
    hp.hidden = 8;
    hp.epochs = 0;
    pred::TrainingReport rep;
    const auto model = pred::train_tiny_surrogate(data, hp, 1, &rep);
    CHECK_EQ(rep.epochs_run, 0);
    const auto req = pred::make_request(data.front());
    const auto out = model.predict(req);
    CHECK_EQ(out.futures.size(), req.histories.size());
    CHECK_EQ(out.futures[req.adversary].size(), static_cast<std::size_t>(req.future_len));
}

TEST_CASE("surrogate trained on straight lines generalizes to held-out straight lines") {
    const auto train_data = straight_suite(20, 81);
    const auto holdout = straight_suite(8, 82);
    pred::SurrogateHyperparams hp;
    hp.hidden = 16;
    hp.epochs = 800;
    const auto model = pred::train_tiny_surrogate(train_data, hp, 5);
    double worst = 0.0;
    for (const auto& sc : holdout) {
        const auto req = pred::make_request(sc);
        const auto out = model.predict(req);
        const int adv = sc.adversary_index();
        std::vector<Vec2> truth;
        for (const auto& s : sc.future_of(adv)) truth.push_back(s.position());
        worst = std::max(worst, metrics::ade(out.futures[req.adversary], truth));
    }
    CHECK(worst <= 0.5);
}

TEST_CASE("surrogate parameter files round-trip") {
    const auto data = straight_suite(6, 91);
    pred::SurrogateHyperparams hp;
    hp.hidden = 8;
    hp.epochs = 100;
    const auto model = pred::train_tiny_surrogate(data, hp, 2);
    const auto dir = fresh_dir("roundtrip");
    model.save_params(dir / "params.json");
    const auto loaded = pred::NeuralSurrogate::load_params(dir / "params.json");
    CHECK_EQ(loaded.history_len(), model.history_len());
    CHECK_EQ(loaded.hidden(), model.hidden());
    std::mt19937_64 rng(5);
    auto req = straight_request();
    for (auto& h : req.histories) h = random_history(rng, req.history_len);
    const auto a = model.predict(req);
    const auto b = loaded.predict(req);
    for (std::size_t i = 0; i < a.futures.size(); ++i) {
        for (std::size_t k = 0; k < a.futures[i].size(); ++k) {
            CHECK_EQ(a.futures[i][k], b.futures[i][k]);
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("surrogate parameter loading validates the file") {
    const auto dir = fresh_dir("badparams");
    std::ofstream(dir / "garbage.json") << "{not json";
    CHECK_THROWS_AS(pred::NeuralSurrogate::load_params(dir / "garbage.json"), core::ParseError);
    std::ofstream(dir / "wrong.json") << R"({"format": "something-else", "version": 1})";
    CHECK_THROWS(pred::NeuralSurrogate::load_params(dir / "wrong.json"));
    CHECK_THROWS(pred::NeuralSurrogate::load_params(dir / "missing.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("training input noise is deterministic and changes the fit") {
    const auto data = straight_suite(6, 95);
    pred::SurrogateHyperparams hp;
    hp.hidden = 8;
    hp.epochs = 100;
    hp.input_noise = 0.3;
    const auto dir = fresh_dir("noise");
    pred::train_tiny_surrogate(data, hp, 4).save_params(dir / "n1.json");
    pred::train_tiny_surrogate(data, hp, 4).save_params(dir / "n2.json");
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    CHECK_EQ(slurp(dir / "n1.json"), slurp(dir / "n2.json"));
    hp.input_noise = 0.0;
    pred::train_tiny_surrogate(data, hp, 4).save_params(dir / "clean.json");
    CHECK_NE(slurp(dir / "n1.json"), slurp(dir / "clean.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("surrogate hyperparameter validation") {
    const auto data = straight_suite(2, 97);
    pred::SurrogateHyperparams hp;
    hp.hidden = 0;
    CHECK_THROWS_AS(pred::train_tiny_surrogate(data, hp, 1), core::ValidationError);
    hp = {};
    hp.epochs = -1;
    CHECK_THROWS_AS(pred::train_tiny_surrogate(data, hp, 1), core::ValidationError);
    hp = {};
    hp.input_noise = -0.1;
    CHECK_THROWS_AS(pred::train_tiny_surrogate(data, hp, 1), core::ValidationError);
    CHECK_THROWS_AS(pred::train_tiny_surrogate({}, {}, 1), core::ValidationError);
}

#include "multicrop/solver.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <string>

#include "multicrop/geometry.hpp"

namespace multicrop {

namespace {

struct Objective {
    const Scene& scene;
    const SolveConfig& cfg;
    ImageSize img;

    explicit Objective(const Scene& s, const SolveConfig& c)
        : scene(s), cfg(c), img{s.full_cam.width, s.full_cam.height} {}

    std::vector<LocalCamera> cameras(const Eigen::VectorXd& theta) const {
        std::vector<LocalCamera> cams(scene.local_cams.size());
        for (std::size_t i = 0; i < cams.size(); ++i) {
            cams[i].s = std::exp(theta[3 * static_cast<Eigen::Index>(i)]);
            cams[i].t_x = theta[3 * static_cast<Eigen::Index>(i) + 1];
            cams[i].t_y = theta[3 * static_cast<Eigen::Index>(i) + 2];
        }
        return cams;
    }

    static Eigen::VectorXd pack(const std::vector<LocalCamera>& cams) {
        Eigen::VectorXd theta(3 * static_cast<Eigen::Index>(cams.size()));
        for (std::size_t i = 0; i < cams.size(); ++i) {
            theta[3 * static_cast<Eigen::Index>(i)] = std::log(cams[i].s);
            theta[3 * static_cast<Eigen::Index>(i) + 1] = cams[i].t_x;
            theta[3 * static_cast<Eigen::Index>(i) + 2] = cams[i].t_y;
        }
        return theta;
    }

    double value(const Eigen::VectorXd& theta) const {
        const auto cams = cameras(theta);
        double total = 0.0;
        if (cfg.lambda_cam != 0.0)
            total += cfg.lambda_cam * cam_loss(cams, scene.bboxes, cfg.weights);
        if (cfg.lambda_2d != 0.0)
            total += cfg.lambda_2d *
                     loss_2d(scene.joints3d, scene.gt2d_full, cams, scene.bboxes, img);
        return total;
    }

    // Chain rule through s = e^theta: d/dtheta = s * d/ds.
    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
        const auto cams = cameras(theta);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
        auto accumulate = [&](const std::vector<CamGrad>& partials, double weight) {
            for (std::size_t i = 0; i < cams.size(); ++i) {
                g[3 * static_cast<Eigen::Index>(i)] += weight * cams[i].s * partials[i].d_s;
                g[3 * static_cast<Eigen::Index>(i) + 1] += weight * partials[i].d_tx;
                g[3 * static_cast<Eigen::Index>(i) + 2] += weight * partials[i].d_ty;
            }
        };
        if (cfg.lambda_cam != 0.0)
            accumulate(cam_loss_grad(cams, scene.bboxes, cfg.weights), cfg.lambda_cam);
        if (cfg.lambda_2d != 0.0)
            accumulate(loss_2d_grad(scene.joints3d, scene.gt2d_full, cams, scene.bboxes, img),
                       cfg.lambda_2d);
        return g;
    }
};

void check_scene(const Scene& scene) {
    if (scene.local_cams.size() < 2)
        throw NotEnoughCrops("solver needs at least 2 crops, got " +
                             std::to_string(scene.local_cams.size()));
    if (scene.local_cams.size() != scene.bboxes.size())
        throw ShapeError("camera count != bbox count in scene");
    for (const LocalCamera& cam : scene.local_cams)
        if (!(cam.s > 0.0)) throw DegenerateCamera("initial camera has non-positive scale");
}

}  // namespace

void SolveConfig::validate() const {
    if (max_iters < 1) throw InvalidSpec("max_iters must be >= 1");
    if (!(step > 0.0)) throw InvalidSpec("step size must be positive");
    if (!(tol_grad >= 0.0)) throw InvalidSpec("tol_grad must be >= 0");
    weights.validate();
}

std::vector<std::array<double, 3>> implied_tfull(const std::vector<LocalCamera>& cams,
                                                 const std::vector<BBox>& bboxes,
                                                 const ImageSize& img) {
    std::vector<std::array<double, 3>> out;
    out.reserve(cams.size());
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const FullCamera f = local_to_full(cams[i], bboxes[i], img);
        out.push_back({f.t_x, f.t_y, f.t_z});
    }
    return out;
}

double implied_spread(const std::vector<LocalCamera>& cams, const std::vector<BBox>& bboxes,
                      const ImageSize& img) {
    const auto pts = implied_tfull(cams, bboxes, img);
    double spread = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i][0] - pts[j][0];
            const double dy = pts[i][1] - pts[j][1];
            const double dz = pts[i][2] - pts[j][2];
            spread = std::max(spread, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
    }
    return spread;
}

std::pair<std::vector<LocalCamera>, SolveReport> refine_cameras(const Scene& scene,
                                                                const SolveConfig& cfg) {
    cfg.validate();
    check_scene(scene);
    const Objective obj(scene, cfg);
    const ImageSize img{scene.full_cam.width, scene.full_cam.height};

    Eigen::VectorXd theta = Objective::pack(scene.local_cams);
    SolveReport report;
    report.initial_cam_loss = cam_loss(scene.local_cams, scene.bboxes, cfg.weights);
    report.initial_loss_2d = loss_2d(scene.joints3d, scene.gt2d_full, scene.local_cams,
                                     scene.bboxes, img);
    report.implied_before = implied_tfull(scene.local_cams, scene.bboxes, img);
    report.spread_before = implied_spread(scene.local_cams, scene.bboxes, img);

    double f = obj.value(theta);
    report.initial_total = f;
    report.trace.push_back(f);

    Eigen::VectorXd best_theta = theta;
    double best_f = f;

    if (cfg.optimizer == OptimizerKind::Adam) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
        Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
        for (int t = 1; t <= cfg.max_iters; ++t) {
            const Eigen::VectorXd g = obj.gradient(theta);
            if (g.lpNorm<Eigen::Infinity>() <= cfg.tol_grad) break;
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
            const double m_corr = 1.0 - std::pow(cfg.beta1, t);
            const double v_corr = 1.0 - std::pow(cfg.beta2, t);
            theta -= cfg.step * (m / m_corr).array()
                         .cwiseQuotient((v / v_corr).array().sqrt() + cfg.adam_eps)
                         .matrix();
            f = obj.value(theta);
            if (std::isnan(f)) throw NumericalError("NaN loss at iteration " + std::to_string(t));
            report.trace.push_back(f);
            report.iterations = t;
            if (f < best_f) {
                best_f = f;
                best_theta = theta;
            }
        }
    } else {
        for (int t = 1; t <= cfg.max_iters; ++t) {
            const Eigen::VectorXd g = obj.gradient(theta);
            if (g.lpNorm<Eigen::Infinity>() <= cfg.tol_grad) break;
            const double g_sq = g.squaredNorm();
            double alpha = cfg.step;
            bool accepted = false;
            for (int halving = 0; halving <= 30; ++halving) {
                const Eigen::VectorXd candidate = theta - alpha * g;
                double f_new = std::numeric_limits<double>::infinity();
                try {
                    f_new = obj.value(candidate);
                } catch (const NumericError&) {
                    // step left the valid region; halve and retry
                }
                if (std::isnan(f_new)) throw NumericalError("NaN loss at iteration " + std::to_string(t));
                if (f_new <= f - 1e-4 * alpha * g_sq) {
                    theta = candidate;
                    f = f_new;
                    accepted = true;
                    break;
                }
                alpha /= 2.0;
            }
            if (!accepted) break;  // no descent step left
            report.trace.push_back(f);
            report.iterations = t;
            if (f < best_f) {
                best_f = f;
                best_theta = theta;
            }
        }
    }

    const std::vector<LocalCamera> refined = obj.cameras(best_theta);
    report.final_total = best_f;
    report.final_cam_loss = cam_loss(refined, scene.bboxes, cfg.weights);
    report.final_loss_2d = loss_2d(scene.joints3d, scene.gt2d_full, refined, scene.bboxes, img);
    report.implied_after = implied_tfull(refined, scene.bboxes, img);
    report.spread_after = implied_spread(refined, scene.bboxes, img);
    return {refined, report};
}

GradCheckReport fd_validate(const Scene& scene, const SolveConfig& cfg) {
    cfg.validate();
    check_scene(scene);
    const Objective obj(scene, cfg);
    const Eigen::VectorXd theta = Objective::pack(scene.local_cams);
    return grad_check([&obj](const Eigen::VectorXd& p) { return obj.value(p); },
                      obj.gradient(theta), theta, {});
}

}  // namespace multicrop

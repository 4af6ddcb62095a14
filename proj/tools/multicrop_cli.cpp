#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "multicrop/consistency.hpp"
#include "multicrop/crops.hpp"
#include "multicrop/encoding.hpp"
#include "multicrop/features.hpp"
#include "multicrop/geometry.hpp"
#include "multicrop/grad_check.hpp"
#include "multicrop/json_io.hpp"
#include "multicrop/rng.hpp"
#include "multicrop/solver.hpp"
#include "multicrop/synth.hpp"

namespace mc = multicrop;
using mc::json;

namespace {

std::string read_stream(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string read_input(const std::string& path) {
    if (path == "-") return read_stream(std::cin);
    std::ifstream f(path);
    if (!f) throw mc::ValidationError("cannot open " + path);
    return read_stream(f);
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw mc::ValidationError("cannot write " + path);
    f << text;
}

void emit(const std::string& path, const json& j) {
    write_output(path, j.dump(2) + "\n");
}

mc::Scene load_scene(const std::string& path) {
    return mc::from_json_checked<mc::Scene>(mc::parse_json(read_input(path)), "scene");
}

mc::BBox parse_bbox(const std::string& text) {
    mc::BBox b;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &b.c_x, &b.c_y, &b.b, &tail) != 3) {
        throw mc::ValidationError("--bbox expects cx,cy,b, got \"" + text + "\"");
    }
    b.validate();
    return b;
}

mc::ImageSize parse_image(const std::string& text) {
    mc::ImageSize img;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lfx%lf%c", &img.width, &img.height, &tail) != 2 ||
        img.width <= 0 || img.height <= 0) {
        throw mc::ValidationError("--image expects WxH, got \"" + text + "\"");
    }
    return img;
}

mc::CropMode parse_mode(const std::string& text) {
    if (text == "fixed") return mc::CropMode::Fixed;
    if (text == "random") return mc::CropMode::Random;
    throw mc::ValidationError("--mode expects fixed or random, got \"" + text + "\"");
}

void warn_oversized(const std::vector<mc::BBox>& boxes, const mc::ImageSize& img) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (mc::crop_exceeds_image(boxes[i], img)) {
            std::cerr << "warning: crop " << i << " extends past the " << img.width << "x"
                      << img.height << " image\n";
        }
    }
}

json joints2d_json(const mc::Joints2D& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p.u, p.v}));
    return arr;
}

struct GenCropsArgs {
    std::string bbox;
    std::string mode = "fixed";
    int m = 5;
    std::uint64_t seed = 0;
    std::string image;
    bool no_shift = false;
    bool no_scale = false;
    std::string out = "-";
};

int run_gen_crops(const GenCropsArgs& a) {
    mc::CropSpec spec;
    spec.mode = parse_mode(a.mode);
    spec.m = a.m;
    spec.seed = a.seed;
    spec.no_shift = a.no_shift;
    spec.no_scale = a.no_scale;
    const auto boxes = mc::generate_crops(parse_bbox(a.bbox), spec);
    if (!a.image.empty()) warn_oversized(boxes, parse_image(a.image));
    emit(a.out, json(boxes));
    return 0;
}

struct MakeSceneArgs {
    std::uint64_t seed = 0;
    int m = 5;
    std::string image = "1920x1080";
    std::string mode = "fixed";
    int joints = 24;
    bool no_shift = false;
    bool no_scale = false;
    double sigma_s = 0.0;
    double sigma_t = 0.0;
    std::uint64_t noise_seed = 1;
    std::string out = "-";
};

int run_make_scene(const MakeSceneArgs& a) {
    mc::SceneConfig cfg;
    const auto img = parse_image(a.image);
    cfg.width = img.width;
    cfg.height = img.height;
    cfg.joint_count = a.joints;
    cfg.crops.mode = parse_mode(a.mode);
    cfg.crops.m = a.m;
    cfg.crops.no_shift = a.no_shift;
    cfg.crops.no_scale = a.no_scale;
    mc::Scene scene = mc::make_scene(a.seed, cfg);
    if (a.sigma_s > 0.0 || a.sigma_t > 0.0) {
        scene = mc::perturb(scene, a.sigma_s, a.sigma_t, a.noise_seed);
    }
    warn_oversized(scene.bboxes, img);
    emit(a.out, json(scene));
    return 0;
}

struct ProjectArgs {
    std::string scene = "-";
    std::string out = "-";
};

int run_project(const ProjectArgs& a) {
    const mc::Scene scene = load_scene(a.scene);
    json crops = json::array();
    for (const auto& cam : scene.local_cams) {
        crops.push_back(joints2d_json(mc::project_crop(scene.joints3d, cam)));
    }
    emit(a.out, json{{"full", joints2d_json(mc::project_full(scene.joints3d, scene.full_cam))},
                     {"crops", crops}});
    return 0;
}

struct CheckConsistencyArgs {
    std::string scene = "-";
    mc::ConsistencyWeights weights;
    std::string out = "-";
};

int run_check_consistency(const CheckConsistencyArgs& a) {
    const mc::Scene scene = load_scene(a.scene);
    json pairs = json::array();
    for (std::size_t i = 0; i < scene.local_cams.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.local_cams.size(); ++j) {
            const auto r = mc::pair_residuals(scene.local_cams[i], scene.bboxes[i],
                                              scene.local_cams[j], scene.bboxes[j]);
            pairs.push_back(json{
                {"i", i}, {"j", j}, {"r_x", r.r_x}, {"r_y", r.r_y}, {"r_s", r.r_s}});
        }
    }
    emit(a.out, json{{"pairs", pairs},
                     {"L_cam", mc::cam_loss(scene.local_cams, scene.bboxes, a.weights)}});
    return 0;
}

struct RecoverArgs {
    std::string scene = "-";
    std::string config;
    std::string out = "-";
    std::string plot_data;
};

int run_recover(const RecoverArgs& a) {
    const mc::Scene scene = load_scene(a.scene);
    mc::SolveConfig cfg;
    if (!a.config.empty()) {
        cfg = mc::from_json_checked<mc::SolveConfig>(mc::parse_json(read_input(a.config)),
                                                     "config");
    }
    const auto [cams, report] = mc::refine_cameras(scene, cfg);
    json j = report;
    j["refined_cams"] = cams;
    emit(a.out, j);
    if (!a.plot_data.empty()) {
        std::ostringstream csv;
        csv << "iteration,total_loss\n";
        csv.precision(17);
        for (std::size_t i = 0; i < report.trace.size(); ++i) {
            csv << i << "," << report.trace[i] << "\n";
        }
        write_output(a.plot_data, csv.str());
    }
    return 0;
}

struct GradCheckArgs {
    std::string target = "all";
    std::uint64_t seed = 0;
    int trials = 3;
    double step = 1e-6;
    int max_coords = 200;
    std::string out = "-";
};

json fd_summary(const mc::GradCheckReport& r, double tol) {
    return json{{"max_rel_err", r.max_rel_err},
                {"max_abs_err", r.max_abs_err},
                {"coords_checked", r.coords_checked},
                {"tolerance", tol},
                {"pass", r.ok(tol)}};
}

json grad_check_cam(std::uint64_t seed, int trials, const mc::GradCheckOptions& opts) {
    mc::GradCheckReport worst;
    for (int t = 0; t < trials; ++t) {
        mc::Scene scene = mc::perturb(mc::make_scene(seed + t), 0.05, 0.05, seed + 100 + t);
        const auto bboxes = scene.bboxes;
        const int m = static_cast<int>(bboxes.size());
        Eigen::VectorXd theta(3 * m);
        for (int i = 0; i < m; ++i) {
            theta[3 * i] = scene.local_cams[i].s;
            theta[3 * i + 1] = scene.local_cams[i].t_x;
            theta[3 * i + 2] = scene.local_cams[i].t_y;
        }
        const auto unpack = [m](const Eigen::VectorXd& v) {
            std::vector<mc::LocalCamera> cams(m);
            for (int i = 0; i < m; ++i) cams[i] = {v[3 * i], v[3 * i + 1], v[3 * i + 2]};
            return cams;
        };
        const auto fn = [&](const Eigen::VectorXd& v) {
            return mc::cam_loss(unpack(v), bboxes);
        };
        const auto grads = mc::cam_loss_grad(unpack(theta), bboxes);
        Eigen::VectorXd g(3 * m);
        for (int i = 0; i < m; ++i) {
            g[3 * i] = grads[i].d_s;
            g[3 * i + 1] = grads[i].d_tx;
            g[3 * i + 2] = grads[i].d_ty;
        }
        const auto r = mc::grad_check(fn, g, theta, opts);
        if (r.max_rel_err >= worst.max_rel_err) worst = r;
    }
    return fd_summary(worst, 1e-5);
}

json grad_check_2d(std::uint64_t seed, int trials, const mc::GradCheckOptions& opts) {
    mc::GradCheckReport worst;
    for (int t = 0; t < trials; ++t) {
        mc::Scene scene = mc::perturb(mc::make_scene(seed + t), 0.05, 0.05, seed + 100 + t);
        const mc::ImageSize img{scene.full_cam.width, scene.full_cam.height};
        const int m = static_cast<int>(scene.bboxes.size());
        Eigen::VectorXd theta(3 * m);
        for (int i = 0; i < m; ++i) {
            theta[3 * i] = scene.local_cams[i].s;
            theta[3 * i + 1] = scene.local_cams[i].t_x;
            theta[3 * i + 2] = scene.local_cams[i].t_y;
        }
        const auto unpack = [m](const Eigen::VectorXd& v) {
            std::vector<mc::LocalCamera> cams(m);
            for (int i = 0; i < m; ++i) cams[i] = {v[3 * i], v[3 * i + 1], v[3 * i + 2]};
            return cams;
        };
        const auto fn = [&](const Eigen::VectorXd& v) {
            return mc::loss_2d(scene.joints3d, scene.gt2d_full, unpack(v), scene.bboxes, img);
        };
        const auto grads =
            mc::loss_2d_grad(scene.joints3d, scene.gt2d_full, unpack(theta), scene.bboxes, img);
        Eigen::VectorXd g(3 * m);
        for (int i = 0; i < m; ++i) {
            g[3 * i] = grads[i].d_s;
            g[3 * i + 1] = grads[i].d_tx;
            g[3 * i + 2] = grads[i].d_ty;
        }
        const auto r = mc::grad_check(fn, g, theta, opts);
        if (r.max_rel_err >= worst.max_rel_err) worst = r;
    }
    return fd_summary(worst, 1e-5);
}

json grad_check_3d(std::uint64_t seed, int trials, const mc::GradCheckOptions& opts) {
    mc::GradCheckReport worst;
    mc::CounterRng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const int k = 8;
        mc::Joints3D gt(k);
        Eigen::VectorXd theta(3 * k);
        for (int i = 0; i < k; ++i) {
            gt[i] = {rng.normal(), rng.normal(), rng.normal()};
            theta[3 * i] = rng.normal();
            theta[3 * i + 1] = rng.normal();
            theta[3 * i + 2] = rng.normal();
        }
        const auto unpack = [k](const Eigen::VectorXd& v) {
            mc::Joints3D j(k);
            for (int i = 0; i < k; ++i) j[i] = {v[3 * i], v[3 * i + 1], v[3 * i + 2]};
            return j;
        };
        const auto fn = [&](const Eigen::VectorXd& v) { return mc::loss_3d(unpack(v), gt); };
        const auto grads = mc::loss_3d_grad(unpack(theta), gt);
        Eigen::VectorXd g(3 * k);
        for (int i = 0; i < k; ++i) {
            g[3 * i] = grads[i].x;
            g[3 * i + 1] = grads[i].y;
            g[3 * i + 2] = grads[i].z;
        }
        const auto r = mc::grad_check(fn, g, theta, opts);
        if (r.max_rel_err >= worst.max_rel_err) worst = r;
    }
    return fd_summary(worst, 1e-5);
}

json grad_check_contrastive(std::uint64_t seed, int trials, const mc::GradCheckOptions& opts) {
    mc::GradCheckReport worst;
    mc::CounterRng rng(seed);
    for (int t = 0; t < trials; ++t) {
        mc::FeatureBatch batch;
        batch.n = 3;
        batch.m = 4;
        const int d = 6;
        batch.z.resize(batch.n * batch.m, d);
        for (Eigen::Index i = 0; i < batch.z.size(); ++i) {
            batch.z(i / d, i % d) = rng.normal();
        }
        const auto fn = [&](const Eigen::VectorXd& v) {
            mc::FeatureBatch b = batch;
            b.z = Eigen::Map<const Eigen::MatrixXd>(v.data(), batch.z.rows(), batch.z.cols());
            return mc::contrastive_loss(b);
        };
        const Eigen::MatrixXd grad = mc::contrastive_loss_grad(batch);
        const Eigen::VectorXd theta =
            Eigen::Map<const Eigen::VectorXd>(batch.z.data(), batch.z.size());
        const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
        const auto r = mc::grad_check(fn, g, theta, opts);
        if (r.max_rel_err >= worst.max_rel_err) worst = r;
    }
    return fd_summary(worst, 1e-4);
}

json grad_check_fusion(std::uint64_t seed, int trials, const mc::GradCheckOptions& opts) {
    mc::GradCheckReport worst;
    for (int t = 0; t < trials; ++t) {
        const int d = 8;
        const int m = 4;
        const int levels = 4;
        mc::FusionNet net(d, m, levels, seed + t);
        mc::CounterRng rng(seed + 1000 + t);
        Eigen::MatrixXd h(m, d);
        Eigen::MatrixXd probe(m, d);
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < d; ++k) {
                h(i, k) = rng.normal();
                probe(i, k) = rng.normal();
            }
        }
        const auto bboxes = mc::random_crops(
            {0.0, 0.0, 1.0}, {mc::CropMode::Random, m, 0.1, 0.65, 1.5, seed + t, false, false});
        const auto fn = [&](const Eigen::VectorXd& v) {
            mc::FusionNet probe_net = net;
            probe_net.set_params(v);
            return mc::fuse_probe(h, bboxes, probe_net, probe);
        };
        const auto r = mc::grad_check(fn, mc::fuse_probe_grad(h, bboxes, net, probe),
                                      net.params(), opts);
        if (r.max_rel_err >= worst.max_rel_err) worst = r;
    }
    return fd_summary(worst, 1e-4);
}

int run_grad_check(const GradCheckArgs& a) {
    mc::GradCheckOptions opts;
    opts.step = a.step;
    opts.max_coords = a.max_coords;
    opts.seed = a.seed + 7;
    json report;
    const bool all = a.target == "all";
    if (all || a.target == "cam") report["cam_loss"] = grad_check_cam(a.seed, a.trials, opts);
    if (all || a.target == "2d") report["loss_2d"] = grad_check_2d(a.seed, a.trials, opts);
    if (all || a.target == "3d") report["loss_3d"] = grad_check_3d(a.seed, a.trials, opts);
    if (all || a.target == "contrastive") {
        report["contrastive_loss"] = grad_check_contrastive(a.seed, a.trials, opts);
    }
    if (all || a.target == "fusion") {
        report["fusion"] = grad_check_fusion(a.seed, a.trials, opts);
    }
    if (report.empty()) {
        throw mc::ValidationError(
            "--target expects all, cam, 2d, 3d, contrastive or fusion, got \"" + a.target + "\"");
    }
    emit(a.out, report);
    bool pass = true;
    for (const auto& [key, value] : report.items()) pass = pass && value.at("pass").get<bool>();
    return pass ? 0 : 2;
}

struct DemoContrastiveArgs {
    int n = 4;
    int m = 5;
    int d = 32;
    std::uint64_t seed = 0;
    double tau = 0.5;
    bool raw = false;
    std::string out = "-";
};

int run_demo_contrastive(const DemoContrastiveArgs& a) {
    if (a.n < 1 || a.m < 1 || a.d < 1) throw mc::ValidationError("--n, --m, --d must be >= 1");
    mc::ContrastNet net(a.d, a.seed, !a.raw);
    mc::CounterRng rng(a.seed + 1);
    mc::FeatureBatch batch;
    batch.n = a.n;
    batch.m = a.m;
    batch.z.resize(static_cast<Eigen::Index>(a.n) * a.m, a.d);
    Eigen::VectorXd h(a.d);
    json gates = json::array();
    for (int i = 0; i < a.n * a.m; ++i) {
        for (int k = 0; k < a.d; ++k) h[k] = rng.normal();
        batch.z.row(i) = net.project(h);
        if (i < a.m) {
            const Eigen::ArrayXd pre = (net.weight_w * h + net.weight_b).array();
            gates.push_back(((1.0 + (-pre).exp()).inverse()).mean());
        }
    }
    const double loss = mc::contrastive_loss(batch, a.tau);

    const Eigen::MatrixXd grad = mc::contrastive_loss_grad(batch, a.tau);
    const auto fn = [&](const Eigen::VectorXd& v) {
        mc::FeatureBatch b = batch;
        b.z = Eigen::Map<const Eigen::MatrixXd>(v.data(), batch.z.rows(), batch.z.cols());
        return mc::contrastive_loss(b, a.tau);
    };
    mc::GradCheckOptions opts;
    opts.max_coords = 200;
    opts.seed = a.seed + 9;
    const auto fd = mc::grad_check(
        fn, Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size()),
        Eigen::Map<const Eigen::VectorXd>(batch.z.data(), batch.z.size()), opts);

    // All-identical features: every similarity ties, so the loss closes to
    // MN log(MN - 1).
    mc::FeatureBatch flat = batch;
    for (Eigen::Index i = 1; i < flat.z.rows(); ++i) flat.z.row(i) = flat.z.row(0);
    const int mn = a.n * a.m;
    json j{{"n", a.n},
           {"m", a.m},
           {"d", a.d},
           {"tau", a.tau},
           {"normalized", !a.raw},
           {"loss", loss},
           {"mean_gate_first_sample", gates},
           {"grad_check", fd_summary(fd, 1e-4)},
           {"identical_features_loss", mc::contrastive_loss(flat, a.tau)},
           {"identical_features_expected", mn > 1 ? mn * std::log(mn - 1.0) : 0.0}};
    emit(a.out, j);
    return 0;
}

struct DemoFusionArgs {
    std::string scene = "-";
    std::uint64_t seed = 0;
    int d = 16;
    int levels = 32;
    double pre_scale = 1.0;
    std::string variant = "supp";
    std::string out = "-";
};

int run_demo_fusion(const DemoFusionArgs& a) {
    const mc::Scene scene = load_scene(a.scene);
    const int m = static_cast<int>(scene.bboxes.size());
    if (m < 1) throw mc::ValidationError("scene has no crops");
    mc::FusionVariant variant;
    if (a.variant == "supp") {
        variant = mc::FusionVariant::SuppMlp;
    } else if (a.variant == "linear") {
        variant = mc::FusionVariant::MainLinear;
    } else {
        throw mc::ValidationError("--variant expects supp or linear, got \"" + a.variant + "\"");
    }
    mc::FusionNet net(a.d, m, a.levels, a.seed, variant, a.pre_scale);
    mc::CounterRng rng(a.seed + 1);
    Eigen::MatrixXd h(m, a.d);
    Eigen::MatrixXd probe(m, a.d);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < a.d; ++k) {
            h(i, k) = rng.normal();
            probe(i, k) = rng.normal();
        }
    }
    const auto result = mc::fuse(h, scene.bboxes, net);

    const auto fn = [&](const Eigen::VectorXd& v) {
        mc::FusionNet probe_net = net;
        probe_net.set_params(v);
        return mc::fuse_probe(h, scene.bboxes, probe_net, probe);
    };
    mc::GradCheckOptions opts;
    opts.max_coords = 200;
    opts.seed = a.seed + 9;
    const auto fd =
        mc::grad_check(fn, mc::fuse_probe_grad(h, scene.bboxes, net, probe), net.params(), opts);

    json weights = json::array();
    json fused = json::array();
    json row_sums = json::array();
    for (int i = 0; i < m; ++i) {
        weights.push_back(std::vector<double>(result.w.row(i).begin(), result.w.row(i).end()));
        fused.push_back(std::vector<double>(result.u.row(i).begin(), result.u.row(i).end()));
        row_sums.push_back(result.w.row(i).sum());
    }
    emit(a.out, json{{"variant", a.variant},
                     {"d", a.d},
                     {"m", m},
                     {"levels", a.levels},
                     {"pre_scale", a.pre_scale},
                     {"param_count", net.param_count()},
                     {"weights", weights},
                     {"row_sums", row_sums},
                     {"fused", fused},
                     {"grad_check", fd_summary(fd, 1e-4)}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-crop weak-perspective camera toolkit"};
    app.require_subcommand(1);

    GenCropsArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-crops", "Generate crop bounding boxes for a base box");
    gen_cmd->add_option("--bbox", gen.bbox, "Base box as cx,cy,b (center offset from image center, side)")
        ->required();
    gen_cmd->add_option("--mode", gen.mode, "fixed or random")->capture_default_str();
    gen_cmd->add_option("--m", gen.m, "Number of crops (random mode)")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--image", gen.image, "Image size WxH; warns when a crop exceeds it");
    gen_cmd->add_flag("--no-shift", gen.no_shift, "Zero the center offsets");
    gen_cmd->add_flag("--no-scale", gen.no_scale, "Keep every box at the base size");
    gen_cmd->add_option("--out", gen.out, "Output file, - for stdout")->capture_default_str();

    MakeSceneArgs ms;
    auto* ms_cmd = app.add_subcommand("make-scene", "Build a synthetic person-and-camera scene");
    ms_cmd->add_option("--seed", ms.seed, "Scene seed")->capture_default_str();
    ms_cmd->add_option("--m", ms.m, "Number of crops")->capture_default_str();
    ms_cmd->add_option("--image", ms.image, "Image size WxH")->capture_default_str();
    ms_cmd->add_option("--mode", ms.mode, "Crop mode, fixed or random")->capture_default_str();
    ms_cmd->add_option("--joints", ms.joints, "Joint count")->capture_default_str();
    ms_cmd->add_flag("--no-shift", ms.no_shift, "Zero the crop center offsets");
    ms_cmd->add_flag("--no-scale", ms.no_scale, "Keep every crop at the base size");
    ms_cmd->add_option("--sigma-s", ms.sigma_s, "Gaussian noise on each camera scale")
        ->capture_default_str();
    ms_cmd->add_option("--sigma-t", ms.sigma_t, "Gaussian noise on each camera translation, meters")
        ->capture_default_str();
    ms_cmd->add_option("--noise-seed", ms.noise_seed, "Seed for the perturbation")
        ->capture_default_str();
    ms_cmd->add_option("--out", ms.out, "Output file, - for stdout")->capture_default_str();

    ProjectArgs pr;
    auto* pr_cmd = app.add_subcommand("project", "Project scene joints into full image and crops");
    pr_cmd->add_option("--scene", pr.scene, "Scene JSON file, - for stdin")->capture_default_str();
    pr_cmd->add_option("--out", pr.out, "Output file, - for stdout")->capture_default_str();

    CheckConsistencyArgs cc;
    auto* cc_cmd =
        app.add_subcommand("check-consistency", "Pairwise camera residuals and consistency loss");
    cc_cmd->add_option("--scene", cc.scene, "Scene JSON file, - for stdin")->capture_default_str();
    cc_cmd->add_option("--lambda-x", cc.weights.lambda_x, "Weight on r_x^2")->capture_default_str();
    cc_cmd->add_option("--lambda-y", cc.weights.lambda_y, "Weight on r_y^2")->capture_default_str();
    cc_cmd->add_option("--lambda-s", cc.weights.lambda_s, "Weight on r_s^2")->capture_default_str();
    cc_cmd->add_option("--out", cc.out, "Output file, - for stdout")->capture_default_str();

    RecoverArgs rc;
    auto* rc_cmd = app.add_subcommand(
        "recover-camera", "Refine noisy per-crop cameras by minimizing consistency + 2D loss");
    rc_cmd->add_option("--scene", rc.scene, "Scene JSON file, - for stdin")->capture_default_str();
    rc_cmd->add_option("--config", rc.config, "Solver config JSON file");
    rc_cmd->add_option("--out", rc.out, "Report output file, - for stdout")->capture_default_str();
    rc_cmd->add_option("--plot-data", rc.plot_data, "Write loss-vs-iteration CSV to this file");

    GradCheckArgs gc;
    auto* gc_cmd =
        app.add_subcommand("grad-check", "Finite-difference checks of the analytic gradients");
    gc_cmd->add_option("--target", gc.target, "all, cam, 2d, 3d, contrastive or fusion")
        ->capture_default_str();
    gc_cmd->add_option("--seed", gc.seed, "Base seed")->capture_default_str();
    gc_cmd->add_option("--trials", gc.trials, "Random configurations per target")
        ->capture_default_str();
    gc_cmd->add_option("--step", gc.step, "Relative finite-difference step")->capture_default_str();
    gc_cmd->add_option("--max-coords", gc.max_coords, "Coordinates sampled per check, 0 = all")
        ->capture_default_str();
    gc_cmd->add_option("--out", gc.out, "Output file, - for stdout")->capture_default_str();

    DemoContrastiveArgs dc;
    auto* dc_cmd = app.add_subcommand("demo-contrastive",
                                      "Multi-positive contrastive loss on random projected features");
    dc_cmd->add_option("--n", dc.n, "Samples")->capture_default_str();
    dc_cmd->add_option("--m", dc.m, "Crops per sample")->capture_default_str();
    dc_cmd->add_option("--d", dc.d, "Feature dimension")->capture_default_str();
    dc_cmd->add_option("--seed", dc.seed, "Seed")->capture_default_str();
    dc_cmd->add_option("--tau", dc.tau, "Temperature")->capture_default_str();
    dc_cmd->add_flag("--raw", dc.raw, "Skip the final L2 normalization");
    dc_cmd->add_option("--out", dc.out, "Output file, - for stdout")->capture_default_str();

    DemoFusionArgs df;
    auto* df_cmd =
        app.add_subcommand("demo-fusion", "Crop-aware fusion weights for a scene's boxes");
    df_cmd->add_option("--scene", df.scene, "Scene JSON file, - for stdin")->capture_default_str();
    df_cmd->add_option("--seed", df.seed, "Seed for weights and features")->capture_default_str();
    df_cmd->add_option("--d", df.d, "Feature dimension")->capture_default_str();
    df_cmd->add_option("--levels", df.levels, "Positional-encoding levels L")->capture_default_str();
    df_cmd->add_option("--pre-scale", df.pre_scale, "Coordinate pre-scale before encoding")
        ->capture_default_str();
    df_cmd->add_option("--variant", df.variant, "supp (MLP) or linear")->capture_default_str();
    df_cmd->add_option("--out", df.out, "Output file, - for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (gen_cmd->parsed()) return run_gen_crops(gen);
        if (ms_cmd->parsed()) return run_make_scene(ms);
        if (pr_cmd->parsed()) return run_project(pr);
        if (cc_cmd->parsed()) return run_check_consistency(cc);
        if (rc_cmd->parsed()) return run_recover(rc);
        if (gc_cmd->parsed()) return run_grad_check(gc);
        if (dc_cmd->parsed()) return run_demo_contrastive(dc);
        if (df_cmd->parsed()) return run_demo_fusion(df);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const multicrop::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const multicrop::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

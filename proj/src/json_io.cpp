#include "multicrop/json_io.hpp"

namespace multicrop {

void to_json(json& j, const BBox& b) {
    j = json{{"c_x", b.c_x}, {"c_y", b.c_y}, {"b", b.b}};
}

void from_json(const json& j, BBox& b) {
    j.at("c_x").get_to(b.c_x);
    j.at("c_y").get_to(b.c_y);
    j.at("b").get_to(b.b);
}

void to_json(json& j, const LocalCamera& c) {
    j = json{{"s", c.s}, {"t_x", c.t_x}, {"t_y", c.t_y}};
}

void from_json(const json& j, LocalCamera& c) {
    j.at("s").get_to(c.s);
    j.at("t_x").get_to(c.t_x);
    j.at("t_y").get_to(c.t_y);
}

void to_json(json& j, const FullCamera& c) {
    j = json{{"t_x", c.t_x}, {"t_y", c.t_y}, {"t_z", c.t_z},
             {"width", c.width}, {"height", c.height},
             {"f_full", c.f_full()}};
}

void from_json(const json& j, FullCamera& c) {
    j.at("t_x").get_to(c.t_x);
    j.at("t_y").get_to(c.t_y);
    j.at("t_z").get_to(c.t_z);
    j.at("width").get_to(c.width);
    j.at("height").get_to(c.height);
    // f_full is derived from width/height; ignored on input.
}

void to_json(json& j, const Joint3D& p) { j = json::array({p.x, p.y, p.z}); }

void from_json(const json& j, Joint3D& p) {
    if (!j.is_array() || j.size() != 3) {
        throw ValidationError("joint3d: expected [x, y, z]");
    }
    j.at(0).get_to(p.x);
    j.at(1).get_to(p.y);
    j.at(2).get_to(p.z);
}

void to_json(json& j, const Joint2D& p) { j = json::array({p.u, p.v}); }

void from_json(const json& j, Joint2D& p) {
    if (!j.is_array() || j.size() != 2) {
        throw ValidationError("joint2d: expected [u, v]");
    }
    j.at(0).get_to(p.u);
    j.at(1).get_to(p.v);
}

void to_json(json& j, const NoiseSigma& s) {
    j = json{{"s", s.s}, {"t", s.t}};
}

void from_json(const json& j, NoiseSigma& s) {
    j.at("s").get_to(s.s);
    j.at("t").get_to(s.t);
}

void to_json(json& j, const Scene& s) {
    j = json{{"joints3d", s.joints3d},
             {"full_cam", s.full_cam},
             {"bboxes", s.bboxes},
             {"local_cams", s.local_cams},
             {"gt2d_full", s.gt2d_full},
             {"noise_sigma", s.noise_sigma}};
}

void from_json(const json& j, Scene& s) {
    j.at("joints3d").get_to(s.joints3d);
    j.at("full_cam").get_to(s.full_cam);
    j.at("bboxes").get_to(s.bboxes);
    j.at("local_cams").get_to(s.local_cams);
    j.at("gt2d_full").get_to(s.gt2d_full);
    if (j.contains("noise_sigma")) {
        j.at("noise_sigma").get_to(s.noise_sigma);
    } else {
        s.noise_sigma = NoiseSigma{};
    }
    if (s.bboxes.size() != s.local_cams.size()) {
        throw ValidationError("scene: bboxes and local_cams length mismatch");
    }
}

void to_json(json& j, const ConsistencyWeights& w) {
    j = json{{"lambda_x", w.lambda_x},
             {"lambda_y", w.lambda_y},
             {"lambda_s", w.lambda_s}};
}

void from_json(const json& j, ConsistencyWeights& w) {
    w.lambda_x = j.value("lambda_x", w.lambda_x);
    w.lambda_y = j.value("lambda_y", w.lambda_y);
    w.lambda_s = j.value("lambda_s", w.lambda_s);
}

void to_json(json& j, const SolveConfig& c) {
    j = json{{"max_iters", c.max_iters},
             {"step", c.step},
             {"optimizer", c.optimizer == OptimizerKind::Adam ? "adam" : "gd"},
             {"beta1", c.beta1},
             {"beta2", c.beta2},
             {"adam_eps", c.adam_eps},
             {"tol_grad", c.tol_grad},
             {"lambda_cam", c.lambda_cam},
             {"lambda_2d", c.lambda_2d},
             {"weights", c.weights}};
}

void from_json(const json& j, SolveConfig& c) {
    c = SolveConfig{};
    c.max_iters = j.value("max_iters", c.max_iters);
    c.step = j.value("step", c.step);
    if (j.contains("optimizer")) {
        const std::string name = j.at("optimizer").get<std::string>();
        if (name == "adam") {
            c.optimizer = OptimizerKind::Adam;
        } else if (name == "gd") {
            c.optimizer = OptimizerKind::GD;
        } else {
            throw ValidationError("optimizer: expected \"adam\" or \"gd\", got \"" +
                                  name + "\"");
        }
    }
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.tol_grad = j.value("tol_grad", c.tol_grad);
    c.lambda_cam = j.value("lambda_cam", c.lambda_cam);
    c.lambda_2d = j.value("lambda_2d", c.lambda_2d);
    if (j.contains("weights")) j.at("weights").get_to(c.weights);
    c.validate();
}

namespace {

json implied_to_json(const std::vector<std::array<double, 3>>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p[0], p[1], p[2]}));
    return arr;
}

}  // namespace

void to_json(json& j, const SolveReport& r) {
    j = json{{"iterations", r.iterations},
             {"initial", json{{"cam_loss", r.initial_cam_loss},
                              {"loss_2d", r.initial_loss_2d},
                              {"total", r.initial_total}}},
             {"final", json{{"cam_loss", r.final_cam_loss},
                            {"loss_2d", r.final_loss_2d},
                            {"total", r.final_total}}},
             {"implied_tfull_before", implied_to_json(r.implied_before)},
             {"implied_tfull_after", implied_to_json(r.implied_after)},
             {"spread_before", r.spread_before},
             {"spread_after", r.spread_after}};
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace multicrop

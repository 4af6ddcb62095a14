#include "multicrop/features.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "multicrop/encoding.hpp"
#include "multicrop/rng.hpp"

namespace multicrop {

namespace {

// Row-major fill, uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
void init_layer(Eigen::MatrixXd& w, CounterRng& rng) {
    const double a = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-a, a);
}

void pack_matrix(const Eigen::MatrixXd& w, Eigen::VectorXd& out, Eigen::Index& pos) {
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) out[pos++] = w(r, c);
}

void pack_vector(const Eigen::VectorXd& v, Eigen::VectorXd& out, Eigen::Index& pos) {
    out.segment(pos, v.size()) = v;
    pos += v.size();
}

void unpack_matrix(const Eigen::VectorXd& in, Eigen::Index& pos, Eigen::MatrixXd& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in[pos++];
}

void unpack_vector(const Eigen::VectorXd& in, Eigen::Index& pos, Eigen::VectorXd& v) {
    v = in.segment(pos, v.size());
    pos += v.size();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
    Eigen::VectorXd e = shifted.array().exp();
    return e / e.sum();
}

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
    return v / std::max(v.norm(), 1e-12);
}

// Rows of concat(h_n, gamma_mn) for one target crop m.
Eigen::MatrixXd pair_features(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes,
                              const FusionNet& net, int target) {
    const int m = net.m();
    Eigen::MatrixXd pairs(m, net.pair_dim());
    for (int n = 0; n < m; ++n) {
        pairs.row(n).head(net.d()) = h.row(n);
        pairs.row(n).tail(net.pair_dim() - net.d()) =
            relative(bboxes[static_cast<std::size_t>(target)], bboxes[static_cast<std::size_t>(n)],
                     net.levels(), net.pre_scale());
    }
    return pairs;
}

void check_fusion_inputs(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes,
                         const FusionNet& net) {
    if (h.rows() != net.m() || static_cast<int>(bboxes.size()) != net.m())
        throw ShapeError("expected " + std::to_string(net.m()) + " crops, got " +
                         std::to_string(h.rows()) + " features and " + std::to_string(bboxes.size()) +
                         " bboxes");
    if (h.cols() != net.d())
        throw ShapeError("feature dim " + std::to_string(h.cols()) + " != net dim " +
                         std::to_string(net.d()));
}

}  // namespace

FusionNet::FusionNet(int d, int m, int levels, std::uint64_t seed, FusionVariant variant,
                     double pre_scale)
    : d_(d), m_(m), levels_(levels), pre_scale_(pre_scale), variant_(variant) {
    if (d < 1 || m < 1 || levels < 0) throw InvalidSpec("fusion net needs d >= 1, m >= 1, L >= 0");
    CounterRng rng(seed);
    if (variant_ == FusionVariant::SuppMlp) {
        reducer_w.resize(kReducedDim, pair_dim());
        reducer_b = Eigen::VectorXd::Zero(kReducedDim);
        hidden_w.resize(kHiddenDim, kReducedDim * m_);
        hidden_b = Eigen::VectorXd::Zero(kHiddenDim);
        out_w.resize(m_, kHiddenDim);
        out_b = Eigen::VectorXd::Zero(m_);
        init_layer(reducer_w, rng);
        init_layer(hidden_w, rng);
        init_layer(out_w, rng);
    } else {
        lin_w.resize(pair_dim());
        const double a = 1.0 / std::sqrt(static_cast<double>(pair_dim()));
        for (Eigen::Index i = 0; i < lin_w.size(); ++i) lin_w[i] = rng.uniform(-a, a);
        lin_b = 0.0;
    }
}

int FusionNet::pair_dim() const { return d_ + encoding_length(levels_); }

Eigen::VectorXd FusionNet::logits(const Eigen::MatrixXd& pairs) const {
    if (variant_ == FusionVariant::MainLinear)
        return (pairs * lin_w).array() + lin_b;
    Eigen::VectorXd flat(kReducedDim * m_);
    for (int n = 0; n < m_; ++n)
        flat.segment(n * kReducedDim, kReducedDim) = reducer_w * pairs.row(n).transpose() + reducer_b;
    const Eigen::VectorXd hid = (hidden_w * flat + hidden_b).array().tanh();
    return out_w * hid + out_b;
}

Eigen::Index FusionNet::param_count() const {
    if (variant_ == FusionVariant::MainLinear) return lin_w.size() + 1;
    return reducer_w.size() + reducer_b.size() + hidden_w.size() + hidden_b.size() + out_w.size() +
           out_b.size();
}

Eigen::VectorXd FusionNet::params() const {
    Eigen::VectorXd p(param_count());
    Eigen::Index pos = 0;
    if (variant_ == FusionVariant::MainLinear) {
        pack_vector(lin_w, p, pos);
        p[pos++] = lin_b;
    } else {
        pack_matrix(reducer_w, p, pos);
        pack_vector(reducer_b, p, pos);
        pack_matrix(hidden_w, p, pos);
        pack_vector(hidden_b, p, pos);
        pack_matrix(out_w, p, pos);
        pack_vector(out_b, p, pos);
    }
    return p;
}

void FusionNet::set_params(const Eigen::VectorXd& p) {
    if (p.size() != param_count()) throw ShapeError("parameter vector has wrong length");
    Eigen::Index pos = 0;
    if (variant_ == FusionVariant::MainLinear) {
        unpack_vector(p, pos, lin_w);
        lin_b = p[pos++];
    } else {
        unpack_matrix(p, pos, reducer_w);
        unpack_vector(p, pos, reducer_b);
        unpack_matrix(p, pos, hidden_w);
        unpack_vector(p, pos, hidden_b);
        unpack_matrix(p, pos, out_w);
        unpack_vector(p, pos, out_b);
    }
}

FusionResult fuse(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes, const FusionNet& net) {
    check_fusion_inputs(h, bboxes, net);
    const int m = net.m();
    FusionResult result;
    result.w.resize(m, m);
    for (int t = 0; t < m; ++t)
        result.w.row(t) = softmax(net.logits(pair_features(h, bboxes, net, t))).transpose();
    result.u = result.w * h;
    return result;
}

Eigen::VectorXd fused_mean(const Eigen::MatrixXd& u) {
    if (u.rows() == 0) throw ShapeError("fused_mean of empty feature set");
    return u.colwise().mean().transpose();
}

double fuse_probe(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes, const FusionNet& net,
                  const Eigen::MatrixXd& probe) {
    const FusionResult r = fuse(h, bboxes, net);
    if (probe.rows() != r.u.rows() || probe.cols() != r.u.cols())
        throw ShapeError("probe shape does not match fused features");
    return (probe.array() * r.u.array()).sum();
}

Eigen::VectorXd fuse_probe_grad(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes,
                                const FusionNet& net, const Eigen::MatrixXd& probe) {
    check_fusion_inputs(h, bboxes, net);
    const int m = net.m();
    const bool mlp = net.variant() == FusionVariant::SuppMlp;

    Eigen::MatrixXd d_reducer_w, d_hidden_w, d_out_w;
    Eigen::VectorXd d_reducer_b, d_hidden_b, d_out_b, d_lin_w;
    double d_lin_b = 0.0;
    if (mlp) {
        d_reducer_w = Eigen::MatrixXd::Zero(net.reducer_w.rows(), net.reducer_w.cols());
        d_reducer_b = Eigen::VectorXd::Zero(net.reducer_b.size());
        d_hidden_w = Eigen::MatrixXd::Zero(net.hidden_w.rows(), net.hidden_w.cols());
        d_hidden_b = Eigen::VectorXd::Zero(net.hidden_b.size());
        d_out_w = Eigen::MatrixXd::Zero(net.out_w.rows(), net.out_w.cols());
        d_out_b = Eigen::VectorXd::Zero(net.out_b.size());
    } else {
        d_lin_w = Eigen::VectorXd::Zero(net.lin_w.size());
    }

    for (int t = 0; t < m; ++t) {
        const Eigen::MatrixXd pairs = pair_features(h, bboxes, net, t);
        // Forward with cached intermediates.
        Eigen::VectorXd flat, hid, logit;
        if (mlp) {
            flat.resize(FusionNet::kReducedDim * m);
            for (int n = 0; n < m; ++n)
                flat.segment(n * FusionNet::kReducedDim, FusionNet::kReducedDim) =
                    net.reducer_w * pairs.row(n).transpose() + net.reducer_b;
            hid = (net.hidden_w * flat + net.hidden_b).array().tanh();
            logit = net.out_w * hid + net.out_b;
        } else {
            logit = (pairs * net.lin_w).array() + net.lin_b;
        }
        const Eigen::VectorXd w = softmax(logit);

        // dS/dw_tn = probe.row(t) . h.row(n); softmax pullback follows.
        const Eigen::VectorXd q = h * probe.row(t).transpose();
        const Eigen::VectorXd d_logit = w.array() * (q.array() - w.dot(q));

        if (mlp) {
            d_out_w += d_logit * hid.transpose();
            d_out_b += d_logit;
            const Eigen::VectorXd d_hid = net.out_w.transpose() * d_logit;
            const Eigen::VectorXd d_pre = d_hid.array() * (1.0 - hid.array().square());
            d_hidden_w += d_pre * flat.transpose();
            d_hidden_b += d_pre;
            const Eigen::VectorXd d_flat = net.hidden_w.transpose() * d_pre;
            for (int n = 0; n < m; ++n) {
                const Eigen::VectorXd d_r =
                    d_flat.segment(n * FusionNet::kReducedDim, FusionNet::kReducedDim);
                d_reducer_w += d_r * pairs.row(n);
                d_reducer_b += d_r;
            }
        } else {
            d_lin_w += pairs.transpose() * d_logit;
            d_lin_b += d_logit.sum();
        }
    }

    Eigen::VectorXd g(net.param_count());
    Eigen::Index pos = 0;
    if (mlp) {
        pack_matrix(d_reducer_w, g, pos);
        pack_vector(d_reducer_b, g, pos);
        pack_matrix(d_hidden_w, g, pos);
        pack_vector(d_hidden_b, g, pos);
        pack_matrix(d_out_w, g, pos);
        pack_vector(d_out_b, g, pos);
    } else {
        pack_vector(d_lin_w, g, pos);
        g[pos++] = d_lin_b;
    }
    return g;
}

ContrastNet::ContrastNet(int d, std::uint64_t seed, bool normalize_output)
    : d_(d), normalize_output_(normalize_output) {
    if (d < 1) throw InvalidSpec("contrast net needs d >= 1");
    CounterRng rng(seed);
    weight_w.resize(d, d);
    weight_b = Eigen::VectorXd::Zero(d);
    proj1_w.resize(d, d);
    proj1_b = Eigen::VectorXd::Zero(d);
    proj2_w.resize(d, d);
    proj2_b = Eigen::VectorXd::Zero(d);
    init_layer(weight_w, rng);
    init_layer(proj1_w, rng);
    init_layer(proj2_w, rng);
}

Eigen::VectorXd ContrastNet::project(const Eigen::VectorXd& h) const {
    if (h.size() != d_)
        throw ShapeError("feature dim " + std::to_string(h.size()) + " != net dim " + std::to_string(d_));
    const Eigen::ArrayXd pre = (weight_w * h + weight_b).array();
    const Eigen::VectorXd gate = (1.0 + (-pre).exp()).inverse();  // sigmoid
    const Eigen::VectorXd weighted = gate.array() * h.array();
    const Eigen::VectorXd block1 = l2_normalize(proj1_w * weighted + proj1_b);
    const Eigen::VectorXd relu = block1.cwiseMax(0.0);
    const Eigen::VectorXd block2 = proj2_w * relu + proj2_b;
    return normalize_output_ ? l2_normalize(block2) : block2;
}

void FeatureBatch::validate() const {
    if (n < 1 || m < 1) throw NotEnoughSamples("batch needs n >= 1 and m >= 1");
    if (z.rows() != static_cast<Eigen::Index>(n) * m)
        throw ShapeError("batch has " + std::to_string(z.rows()) + " rows, expected " +
                         std::to_string(static_cast<Eigen::Index>(n) * m));
}

double contrastive_loss(const FeatureBatch& batch, double tau) {
    batch.validate();
    if (!(tau > 0.0)) throw InvalidSpec("temperature must be positive");
    const Eigen::Index total = batch.z.rows();
    if (total < 2) throw NotEnoughSamples("contrastive loss needs at least 2 features");
    if (batch.m < 2) return 0.0;  // no positives, every inner sum is empty

    const Eigen::MatrixXd sim = (batch.z * batch.z.transpose()) / tau;
    double loss = 0.0;
    for (int i = 0; i < batch.n; ++i) {
        for (int mm = 0; mm < batch.m; ++mm) {
            const Eigen::Index a = batch.row(i, mm);
            double max_sim = -std::numeric_limits<double>::infinity();
            for (Eigen::Index l = 0; l < total; ++l)
                if (l != a) max_sim = std::max(max_sim, sim(a, l));
            double denom = 0.0;
            for (Eigen::Index l = 0; l < total; ++l)
                if (l != a) denom += std::exp(sim(a, l) - max_sim);
            const double log_denom = max_sim + std::log(denom);
            double pos_sum = 0.0;
            for (int j = 0; j < batch.m; ++j)
                if (j != mm) pos_sum += sim(a, batch.row(i, j));
            loss += log_denom - pos_sum / (batch.m - 1);
        }
    }
    return loss;
}

Eigen::MatrixXd contrastive_loss_grad(const FeatureBatch& batch, double tau) {
    batch.validate();
    if (!(tau > 0.0)) throw InvalidSpec("temperature must be positive");
    const Eigen::Index total = batch.z.rows();
    if (total < 2) throw NotEnoughSamples("contrastive loss needs at least 2 features");
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(total, batch.z.cols());
    if (batch.m < 2) return grad;

    const Eigen::MatrixXd sim = (batch.z * batch.z.transpose()) / tau;
    const double pos_coef = 1.0 / ((batch.m - 1) * tau);
    for (int i = 0; i < batch.n; ++i) {
        for (int mm = 0; mm < batch.m; ++mm) {
            const Eigen::Index a = batch.row(i, mm);
            for (int j = 0; j < batch.m; ++j) {
                if (j == mm) continue;
                const Eigen::Index p = batch.row(i, j);
                grad.row(a) -= pos_coef * batch.z.row(p);
                grad.row(p) -= pos_coef * batch.z.row(a);
            }
            double max_sim = -std::numeric_limits<double>::infinity();
            for (Eigen::Index l = 0; l < total; ++l)
                if (l != a) max_sim = std::max(max_sim, sim(a, l));
            double denom = 0.0;
            for (Eigen::Index l = 0; l < total; ++l)
                if (l != a) denom += std::exp(sim(a, l) - max_sim);
            for (Eigen::Index l = 0; l < total; ++l) {
                if (l == a) continue;
                const double p_al = std::exp(sim(a, l) - max_sim) / denom;
                grad.row(a) += (p_al / tau) * batch.z.row(l);
                grad.row(l) += (p_al / tau) * batch.z.row(a);
            }
        }
    }
    return grad;
}

}  // namespace multicrop

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "multicrop/types.hpp"

namespace multicrop {

/// Weight computation for crop-aware fusion. MainLinear scores each
/// concat(h_n, gamma_mn) with one shared linear layer; SuppMlp reduces each
/// pair to 256 channels, flattens to 256*M and runs 256M -> 64 -> M with a
/// Tanh on the hidden layer. Softmax over n happens in fuse().
enum class FusionVariant { SuppMlp, MainLinear };

class FusionNet {
public:
    FusionNet(int d, int m, int levels, std::uint64_t seed,
              FusionVariant variant = FusionVariant::SuppMlp, double pre_scale = 1.0);

    int d() const { return d_; }
    int m() const { return m_; }
    int levels() const { return levels_; }
    double pre_scale() const { return pre_scale_; }
    FusionVariant variant() const { return variant_; }
    int pair_dim() const;  // d + |gamma|

    /// Pre-softmax scores for one target crop; pairs is m rows of
    /// concat(h_n, gamma_mn).
    Eigen::VectorXd logits(const Eigen::MatrixXd& pairs) const;

    Eigen::Index param_count() const;
    Eigen::VectorXd params() const;
    void set_params(const Eigen::VectorXd& p);

    // Weights are public so tests can force specific logits.
    Eigen::MatrixXd reducer_w;  // 256 x pair_dim
    Eigen::VectorXd reducer_b;
    Eigen::MatrixXd hidden_w;   // 64 x 256m
    Eigen::VectorXd hidden_b;
    Eigen::MatrixXd out_w;      // m x 64
    Eigen::VectorXd out_b;
    Eigen::VectorXd lin_w;      // pair_dim (MainLinear)
    double lin_b = 0.0;

    static constexpr int kReducedDim = 256;
    static constexpr int kHiddenDim = 64;

private:
    int d_;
    int m_;
    int levels_;
    double pre_scale_;
    FusionVariant variant_;
};

struct FusionResult {
    Eigen::MatrixXd u;  // m x d fused features
    Eigen::MatrixXd w;  // m x m softmax weights, each row sums to 1
};

/// u_m = sum_n w_mn h_n with w_m. = softmax of the net's scores over
/// concat(h_n, gamma_mn). h holds one crop feature per row.
FusionResult fuse(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes, const FusionNet& net);

/// Componentwise mean over the fused rows.
Eigen::VectorXd fused_mean(const Eigen::MatrixXd& u);

/// Scalar probe sum_mk probe(m,k) u(m,k) and its gradient with respect to
/// the net parameters, for finite-difference verification of the fusion
/// backward pass.
double fuse_probe(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes, const FusionNet& net,
                  const Eigen::MatrixXd& probe);

Eigen::VectorXd fuse_probe_grad(const Eigen::MatrixXd& h, const std::vector<BBox>& bboxes,
                                const FusionNet& net, const Eigen::MatrixXd& probe);

/// Weighting layer plus SimCLR-style projector. The projector is two dense
/// blocks with a ReLU between them; normalization is per-vector L2. With
/// normalize_output false the second block has no normalization, so raw
/// (uncosine) dot products reach the loss.
class ContrastNet {
public:
    ContrastNet(int d, std::uint64_t seed, bool normalize_output = true);

    /// z = g(sigmoid(dense(h)) .* h).
    Eigen::VectorXd project(const Eigen::VectorXd& h) const;

    int d() const { return d_; }
    bool normalize_output() const { return normalize_output_; }

    Eigen::MatrixXd weight_w;  // d x d
    Eigen::VectorXd weight_b;
    Eigen::MatrixXd proj1_w;
    Eigen::VectorXd proj1_b;
    Eigen::MatrixXd proj2_w;
    Eigen::VectorXd proj2_b;

private:
    int d_;
    bool normalize_output_;
};

/// N samples x M crops of projected features; row i*m + crop of z.
struct FeatureBatch {
    int n = 0;
    int m = 0;
    Eigen::MatrixXd z;

    void validate() const;
    Eigen::Index row(int sample, int crop) const { return static_cast<Eigen::Index>(sample) * m + crop; }
};

/// Multi-positive InfoNCE over the batch: all other crops of the same
/// sample are positives, the denominator runs over every feature in the
/// batch except the anchor itself.
double contrastive_loss(const FeatureBatch& batch, double tau = 0.5);

/// Gradient of contrastive_loss with respect to each z entry.
Eigen::MatrixXd contrastive_loss_grad(const FeatureBatch& batch, double tau = 0.5);

}  // namespace multicrop

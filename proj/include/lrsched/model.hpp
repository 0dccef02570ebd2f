#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lrsched {

enum class Activation { Identity, Tanh, Softplus };
enum class OutputTransform { Identity, Softmax };
enum class Loss { Mse, CrossEntropy };

// Feedforward dense network description. Smooth activations only; MSE is the
// half-quadratic mean (1/(2N)) sum ||y - f(x)||^2, cross-entropy the mean
// negative log-likelihood under a softmax output.
struct ModelSpec {
    std::vector<int> layer_sizes;  // e.g. {4, 10, 6}
    Activation hidden_activation = Activation::Tanh;
    OutputTransform output_transform = OutputTransform::Identity;
    std::vector<std::uint8_t> bias_flags;  // one per weight layer
    Loss loss = Loss::Mse;

    void validate() const;
    std::size_t n_layers() const { return layer_sizes.size() - 1; }
    std::size_t param_count() const;
};

// Flat parameter vector. Layout per layer: W (in x out, row-major), then the
// bias row when flagged.
struct Weights {
    std::vector<double> flat;
};

struct LayerLayout {
    std::size_t w_off;
    std::size_t b_off;  // size_t(-1) when the layer has no bias
    std::size_t in;
    std::size_t out;
    bool has_bias() const { return b_off != static_cast<std::size_t>(-1); }
};

std::vector<LayerLayout> weight_layout(const ModelSpec& spec);

// Per-step batch selection policy.
struct BatchSpec {
    enum class Kind { Full, Uniform, ClassBalanced };
    Kind kind = Kind::Full;
    std::size_t size = 0;
    std::uint64_t seed = 0;
};

struct TaskData {
    std::size_t n_samples = 0;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::vector<double> inputs;   // n_samples x input_dim
    std::vector<double> targets;  // n_samples x output_dim
    std::vector<std::int32_t> class_ids;  // optional, for class-balanced batches
    BatchSpec batch;

    void validate(const ModelSpec& spec) const;
};

// Batch row indices for a given step; empty result means "use all rows".
void sample_batch(const TaskData& data, std::size_t step,
                  std::vector<std::uint32_t>& out);

// Reusable forward/backward scratch space. Not thread-safe; use one per thread.
class Workspace {
public:
    void prepare(const ModelSpec& spec, std::size_t max_batch);

private:
    friend class MlpOps;
    std::vector<std::vector<double>> z_, a_, d_, gpre_, sig_;
    std::vector<std::vector<double>> rz_, ra_, rd_;
    std::vector<double> xbuf_, ybuf_, wt_, rgpre_;
    std::vector<int> shape_;
    std::size_t cap_ = 0;
};

// Loss (no gradient) on the given batch; empty batch span = full data.
double loss_only(const ModelSpec& spec, const Weights& w, const TaskData& data,
                 std::span<const std::uint32_t> batch, Workspace& ws);

// Loss and its exact gradient via reverse accumulation. grad must have
// param_count() entries; it is overwritten.
double loss_and_gradient(const ModelSpec& spec, const Weights& w,
                         const TaskData& data,
                         std::span<const std::uint32_t> batch,
                         std::span<double> grad, Workspace& ws);

// Convenience full-batch overload used by tests.
std::pair<double, std::vector<double>> loss_and_gradient(const ModelSpec& spec,
                                                         const Weights& w,
                                                         const TaskData& data);

// Loss, gradient and Hessian-vector product H*v on the same batch
// (forward-over-reverse tangent propagation).
double loss_grad_hvp(const ModelSpec& spec, const Weights& w, const TaskData& data,
                     std::span<const std::uint32_t> batch,
                     std::span<const double> v, std::span<double> grad,
                     std::span<double> hv, Workspace& ws);

// Network outputs (post output transform) for a row-major input block.
std::vector<double> predict(const ModelSpec& spec, const Weights& w,
                            const double* inputs, std::size_t n);

}  // namespace lrsched

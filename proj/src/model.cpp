#include "lrsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lrsched/errors.hpp"
#include "lrsched/kernels.hpp"
#include "lrsched/rng.hpp"

namespace lrsched {

void ModelSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw DomainError("ModelSpec: need at least input and output sizes");
    for (int s : layer_sizes)
        if (s <= 0) throw DomainError("ModelSpec: layer sizes must be positive");
    if (bias_flags.size() != n_layers())
        throw DomainError("ModelSpec: one bias flag per weight layer required");
    if (output_transform == OutputTransform::Softmax && loss != Loss::CrossEntropy)
        throw DomainError("ModelSpec: softmax output requires cross-entropy loss");
}

std::size_t ModelSpec::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1];
        if (bias_flags[l]) n += layer_sizes[l + 1];
    }
    return n;
}

std::vector<LayerLayout> weight_layout(const ModelSpec& spec) {
    std::vector<LayerLayout> out;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        LayerLayout ll{};
        ll.in = static_cast<std::size_t>(spec.layer_sizes[l]);
        ll.out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        ll.w_off = off;
        off += ll.in * ll.out;
        if (spec.bias_flags[l]) {
            ll.b_off = off;
            off += ll.out;
        } else {
            ll.b_off = static_cast<std::size_t>(-1);
        }
        out.push_back(ll);
    }
    return out;
}

void TaskData::validate(const ModelSpec& spec) const {
    if (inputs.size() != n_samples * input_dim ||
        targets.size() != n_samples * output_dim)
        throw ContractError("TaskData: buffer sizes disagree with dimensions");
    if (static_cast<std::size_t>(spec.layer_sizes.front()) != input_dim ||
        static_cast<std::size_t>(spec.layer_sizes.back()) != output_dim)
        throw ContractError("TaskData: dimensions disagree with model spec");
    if (batch.kind == BatchSpec::Kind::ClassBalanced && class_ids.size() != n_samples)
        throw ContractError("TaskData: class-balanced batches need class ids");
}

void sample_batch(const TaskData& data, std::size_t step,
                  std::vector<std::uint32_t>& out) {
    out.clear();
    if (data.batch.kind == BatchSpec::Kind::Full) return;
    Rng rng(Rng::mix(data.batch.seed, step));
    if (data.batch.kind == BatchSpec::Kind::Uniform) {
        out.reserve(data.batch.size);
        for (std::size_t i = 0; i < data.batch.size; ++i)
            out.push_back(static_cast<std::uint32_t>(rng.index(data.n_samples)));
        return;
    }
    // Class-balanced with replacement: size/n_classes draws per class.
    std::int32_t n_classes = 0;
    for (std::int32_t c : data.class_ids) n_classes = std::max(n_classes, c + 1);
    std::vector<std::vector<std::uint32_t>> byclass(n_classes);
    for (std::size_t i = 0; i < data.n_samples; ++i)
        byclass[data.class_ids[i]].push_back(static_cast<std::uint32_t>(i));
    const std::size_t per = std::max<std::size_t>(1, data.batch.size / n_classes);
    for (std::int32_t c = 0; c < n_classes; ++c) {
        if (byclass[c].empty()) continue;
        for (std::size_t i = 0; i < per; ++i)
            out.push_back(byclass[c][rng.index(byclass[c].size())]);
    }
}

void Workspace::prepare(const ModelSpec& spec, std::size_t max_batch) {
    std::vector<int> shape = spec.layer_sizes;
    if (shape == shape_ && max_batch <= cap_) return;
    shape_ = shape;
    cap_ = std::max(cap_, max_batch);
    const std::size_t L = spec.n_layers();
    auto sized = [&](std::vector<std::vector<double>>& v) {
        v.assign(L + 1, {});
        for (std::size_t l = 1; l <= L; ++l)
            v[l].assign(cap_ * static_cast<std::size_t>(shape_[l]), 0.0);
    };
    sized(z_);
    sized(a_);
    sized(d_);
    sized(rz_);
    sized(ra_);
    sized(rd_);
    gpre_.assign(L + 1, {});
    sig_.assign(L + 1, {});
    for (std::size_t l = 1; l < L; ++l) {
        gpre_[l].assign(cap_ * static_cast<std::size_t>(shape_[l]), 0.0);
        if (spec.hidden_activation == Activation::Softplus)
            sig_[l].assign(cap_ * static_cast<std::size_t>(shape_[l]), 0.0);
    }
    xbuf_.assign(cap_ * static_cast<std::size_t>(shape_.front()), 0.0);
    ybuf_.assign(cap_ * static_cast<std::size_t>(shape_.back()), 0.0);
    std::size_t maxw = 0, maxn = 0;
    for (std::size_t l = 0; l < L; ++l) {
        maxw = std::max(maxw, static_cast<std::size_t>(shape_[l]) * shape_[l + 1]);
        maxn = std::max(maxn, cap_ * static_cast<std::size_t>(shape_[l]));
    }
    wt_.assign(maxw, 0.0);
    rgpre_.assign(maxn, 0.0);
}

namespace {

void transpose(const double* src, std::size_t rows, std::size_t cols, double* dst) {
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) dst[j * rows + i] = src[i * cols + j];
}

}  // namespace

// All forward/backward passes share this helper; it owns no storage.
class MlpOps {
public:
    MlpOps(const ModelSpec& spec, const Weights& w, const TaskData& data,
           std::span<const std::uint32_t> batch, Workspace& ws)
        : spec_(spec), w_(w), data_(data), ws_(ws), layout_(weight_layout(spec)) {
        spec_.validate();
        data_.validate(spec_);
        if (w_.flat.size() != spec_.param_count())
            throw ContractError("Weights: length disagrees with model spec");
        B_ = batch.empty() ? data.n_samples : batch.size();
        ws_.prepare(spec_, B_);
        if (batch.empty()) {
            x_ = data.inputs.data();
            y_ = data.targets.data();
        } else {
            for (std::size_t i = 0; i < B_; ++i) {
                const std::uint32_t r = batch[i];
                if (r >= data.n_samples) throw ContractError("batch index out of range");
                std::memcpy(ws_.xbuf_.data() + i * data.input_dim,
                            data.inputs.data() + static_cast<std::size_t>(r) * data.input_dim,
                            data.input_dim * sizeof(double));
                std::memcpy(ws_.ybuf_.data() + i * data.output_dim,
                            data.targets.data() + static_cast<std::size_t>(r) * data.output_dim,
                            data.output_dim * sizeof(double));
            }
            x_ = ws_.xbuf_.data();
            y_ = ws_.ybuf_.data();
        }
    }

    double forward() {
        const auto& K = kern::ops();
        const std::size_t L = spec_.n_layers();
        const double* aprev = x_;
        for (std::size_t l = 1; l <= L; ++l) {
            const LayerLayout& ll = layout_[l - 1];
            double* z = ws_.z_[l].data();
            std::memset(z, 0, B_ * ll.out * sizeof(double));
            K.matmul_nn(aprev, w_.flat.data() + ll.w_off, z, B_, ll.in, ll.out);
            if (ll.has_bias()) K.addrow(w_.flat.data() + ll.b_off, z, B_, ll.out);
            if (l < L) {
                double* a = ws_.a_[l].data();
                apply_activation(z, a, l);
                aprev = a;
            } else {
                output_head(z, ws_.a_[L].data());
            }
        }
        return loss_value();
    }

    void backward(std::span<double> grad) {
        const auto& K = kern::ops();
        const std::size_t L = spec_.n_layers();
        std::fill(grad.begin(), grad.end(), 0.0);
        fill_output_delta();
        for (std::size_t l = L; l >= 1; --l) {
            const LayerLayout& ll = layout_[l - 1];
            const double* ain = (l == 1) ? x_ : ws_.a_[l - 1].data();
            K.matmul_tn(ain, ws_.d_[l].data(), grad.data() + ll.w_off, ll.in, B_, ll.out);
            if (ll.has_bias())
                K.colsum_acc(ws_.d_[l].data(), B_, ll.out, grad.data() + ll.b_off);
            if (l > 1) {
                double* g = ws_.gpre_[l - 1].data();
                std::memset(g, 0, B_ * ll.in * sizeof(double));
                transpose(w_.flat.data() + ll.w_off, ll.in, ll.out, ws_.wt_.data());
                K.matmul_nn(ws_.d_[l].data(), ws_.wt_.data(), g, B_, ll.out, ll.in);
                apply_act_grad(g, ws_.d_[l - 1].data(), l - 1);
            }
        }
    }

    const double* outputs() const { return ws_.a_[spec_.n_layers()].data(); }

    // Tangent (R-op) passes; requires forward() and backward() to have run.
    void hvp(std::span<const double> v, std::span<double> hv) {
        const auto& K = kern::ops();
        const std::size_t L = spec_.n_layers();
        std::fill(hv.begin(), hv.end(), 0.0);
        // forward tangents
        for (std::size_t l = 1; l <= L; ++l) {
            const LayerLayout& ll = layout_[l - 1];
            double* rz = ws_.rz_[l].data();
            std::memset(rz, 0, B_ * ll.out * sizeof(double));
            if (l > 1)
                K.matmul_nn(ws_.ra_[l - 1].data(), w_.flat.data() + ll.w_off, rz, B_,
                            ll.in, ll.out);
            const double* ain = (l == 1) ? x_ : ws_.a_[l - 1].data();
            K.matmul_nn(ain, v.data() + ll.w_off, rz, B_, ll.in, ll.out);
            if (ll.has_bias()) K.addrow(v.data() + ll.b_off, rz, B_, ll.out);
            if (l < L) {
                apply_act_grad(rz, ws_.ra_[l].data(), l);
            } else {
                output_head_tangent(rz, ws_.ra_[L].data());
            }
        }
        // loss-head tangent: RD_L = RA_L / B for both supported losses
        {
            const double invb = 1.0 / static_cast<double>(B_);
            const std::size_t n = B_ * layout_[L - 1].out;
            const double* ra = ws_.ra_[L].data();
            double* rd = ws_.rd_[L].data();
            for (std::size_t i = 0; i < n; ++i) rd[i] = ra[i] * invb;
        }
        // backward tangents
        for (std::size_t l = L; l >= 1; --l) {
            const LayerLayout& ll = layout_[l - 1];
            const double* ain = (l == 1) ? x_ : ws_.a_[l - 1].data();
            if (l > 1)
                K.matmul_tn(ws_.ra_[l - 1].data(), ws_.d_[l].data(),
                            hv.data() + ll.w_off, ll.in, B_, ll.out);
            K.matmul_tn(ain, ws_.rd_[l].data(), hv.data() + ll.w_off, ll.in, B_, ll.out);
            if (ll.has_bias())
                K.colsum_acc(ws_.rd_[l].data(), B_, ll.out, hv.data() + ll.b_off);
            if (l > 1) {
                double* rg = ws_.rgpre_.data();
                std::memset(rg, 0, B_ * ll.in * sizeof(double));
                transpose(w_.flat.data() + ll.w_off, ll.in, ll.out, ws_.wt_.data());
                K.matmul_nn(ws_.rd_[l].data(), ws_.wt_.data(), rg, B_, ll.out, ll.in);
                transpose(v.data() + ll.w_off, ll.in, ll.out, ws_.wt_.data());
                K.matmul_nn(ws_.d_[l].data(), ws_.wt_.data(), rg, B_, ll.out, ll.in);
                tangent_act_delta(rg, l - 1);
            }
        }
    }

private:
    void apply_activation(const double* z, double* a, std::size_t l) {
        const auto& K = kern::ops();
        const std::size_t n = B_ * layout_[l - 1].out;
        switch (spec_.hidden_activation) {
            case Activation::Identity:
                std::memcpy(a, z, n * sizeof(double));
                break;
            case Activation::Tanh:
                K.vtanh(z, a, n);
                break;
            case Activation::Softplus:
                K.vsoftplus(z, a, n);
                K.vsigmoid(z, ws_.sig_[l].data(), n);
                break;
        }
    }

    // out = g .* act'(z_l), using stored activation state.
    void apply_act_grad(const double* g, double* out, std::size_t l) {
        const auto& K = kern::ops();
        const std::size_t n = B_ * layout_[l - 1].out;
        switch (spec_.hidden_activation) {
            case Activation::Identity:
                if (out != g) std::memcpy(out, g, n * sizeof(double));
                break;
            case Activation::Tanh:
                K.vtanh_bwd(g, ws_.a_[l].data(), out, n);
                break;
            case Activation::Softplus:
                K.vmul(g, ws_.sig_[l].data(), out, n);
                break;
        }
    }

    // rd[l] = rg .* act' + gpre .* act'' .* rz
    void tangent_act_delta(const double* rg, std::size_t l) {
        const auto& K = kern::ops();
        const std::size_t n = B_ * layout_[l - 1].out;
        double* rd = ws_.rd_[l].data();
        apply_act_grad(rg, rd, l);
        switch (spec_.hidden_activation) {
            case Activation::Identity:
                break;
            case Activation::Tanh:
                K.vtanh_curv_acc(ws_.gpre_[l].data(), ws_.a_[l].data(),
                                 ws_.rz_[l].data(), rd, n);
                break;
            case Activation::Softplus:
                K.vsig_curv_acc(ws_.gpre_[l].data(), ws_.sig_[l].data(),
                                ws_.rz_[l].data(), rd, n);
                break;
        }
    }

    void output_head(const double* z, double* a) {
        const auto& K = kern::ops();
        const std::size_t out = layout_.back().out;
        if (spec_.output_transform == OutputTransform::Identity) {
            std::memcpy(a, z, B_ * out * sizeof(double));
            return;
        }
        for (std::size_t i = 0; i < B_; ++i) {
            const double* zr = z + i * out;
            double* ar = a + i * out;
            double m = zr[0];
            for (std::size_t j = 1; j < out; ++j) m = std::max(m, zr[j]);
            double s = 0.0;
            for (std::size_t j = 0; j < out; ++j) ar[j] = zr[j] - m;
            K.vexp(ar, ar, out);
            for (std::size_t j = 0; j < out; ++j) s += ar[j];
            const double inv = 1.0 / s;
            for (std::size_t j = 0; j < out; ++j) ar[j] *= inv;
        }
    }

    void output_head_tangent(const double* rz, double* ra) {
        const auto& K = kern::ops();
        const std::size_t out = layout_.back().out;
        if (spec_.output_transform == OutputTransform::Identity) {
            std::memcpy(ra, rz, B_ * out * sizeof(double));
            return;
        }
        const double* p = ws_.a_[spec_.n_layers()].data();
        for (std::size_t i = 0; i < B_; ++i) {
            const double* pr = p + i * out;
            const double* rzr = rz + i * out;
            double* rar = ra + i * out;
            const double s = K.dot(pr, rzr, out);
            for (std::size_t j = 0; j < out; ++j) rar[j] = pr[j] * (rzr[j] - s);
        }
    }

    double loss_value() {
        const std::size_t L = spec_.n_layers();
        const std::size_t out = layout_.back().out;
        const double* a = ws_.a_[L].data();
        double loss = 0.0;
        if (spec_.loss == Loss::Mse) {
            double s = 0.0;
            for (std::size_t i = 0; i < B_ * out; ++i) {
                const double r = a[i] - y_[i];
                s += r * r;
            }
            loss = 0.5 * s / static_cast<double>(B_);
        } else {
            double s = 0.0;
            for (std::size_t i = 0; i < B_ * out; ++i)
                if (y_[i] != 0.0) s -= y_[i] * std::log(std::max(a[i], 1e-300));
            loss = s / static_cast<double>(B_);
        }
        if (!std::isfinite(loss)) throw NumericalError("non-finite loss");
        return loss;
    }

    void fill_output_delta() {
        const std::size_t L = spec_.n_layers();
        const std::size_t n = B_ * layout_.back().out;
        const double* a = ws_.a_[L].data();
        double* d = ws_.d_[L].data();
        const double invb = 1.0 / static_cast<double>(B_);
        for (std::size_t i = 0; i < n; ++i) d[i] = (a[i] - y_[i]) * invb;
    }

    const ModelSpec& spec_;
    const Weights& w_;
    const TaskData& data_;
    Workspace& ws_;
    std::vector<LayerLayout> layout_;
    const double* x_ = nullptr;
    const double* y_ = nullptr;
    std::size_t B_ = 0;
};

double loss_only(const ModelSpec& spec, const Weights& w, const TaskData& data,
                 std::span<const std::uint32_t> batch, Workspace& ws) {
    MlpOps op(spec, w, data, batch, ws);
    return op.forward();
}

double loss_and_gradient(const ModelSpec& spec, const Weights& w,
                         const TaskData& data,
                         std::span<const std::uint32_t> batch,
                         std::span<double> grad, Workspace& ws) {
    if (grad.size() != spec.param_count())
        throw ContractError("loss_and_gradient: gradient span has wrong length");
    MlpOps op(spec, w, data, batch, ws);
    const double loss = op.forward();
    op.backward(grad);
    return loss;
}

std::pair<double, std::vector<double>> loss_and_gradient(const ModelSpec& spec,
                                                         const Weights& w,
                                                         const TaskData& data) {
    Workspace ws;
    std::vector<double> grad(spec.param_count(), 0.0);
    const double loss = loss_and_gradient(spec, w, data, {}, grad, ws);
    return {loss, std::move(grad)};
}

std::vector<double> predict(const ModelSpec& spec, const Weights& w,
                            const double* inputs, std::size_t n) {
    TaskData td;
    td.n_samples = n;
    td.input_dim = static_cast<std::size_t>(spec.layer_sizes.front());
    td.output_dim = static_cast<std::size_t>(spec.layer_sizes.back());
    td.inputs.assign(inputs, inputs + n * td.input_dim);
    td.targets.assign(n * td.output_dim, 0.0);
    Workspace ws;
    MlpOps op(spec, w, td, {}, ws);
    op.forward();
    const double* out = op.outputs();
    return std::vector<double>(out, out + n * td.output_dim);
}

double loss_grad_hvp(const ModelSpec& spec, const Weights& w, const TaskData& data,
                     std::span<const std::uint32_t> batch,
                     std::span<const double> v, std::span<double> grad,
                     std::span<double> hv, Workspace& ws) {
    if (grad.size() != spec.param_count() || hv.size() != spec.param_count() ||
        v.size() != spec.param_count())
        throw ContractError("loss_grad_hvp: span length disagrees with model");
    MlpOps op(spec, w, data, batch, ws);
    const double loss = op.forward();
    op.backward(grad);
    op.hvp(v, hv);
    return loss;
}

}  // namespace lrsched

#include "lrsched/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "lrsched/errors.hpp"
#include "lrsched/idx.hpp"
#include "lrsched/rng.hpp"

namespace lrsched {

namespace {

constexpr std::uint64_t kTeacherSalt = 0x7ea5;
constexpr std::uint64_t kStudentSalt = 0x57d0;
constexpr std::uint64_t kDataSalt = 0xda7a;

void xavier_uniform(const ModelSpec& spec, Weights& w, Rng& rng) {
    w.flat.assign(spec.param_count(), 0.0);
    for (const LayerLayout& ll : weight_layout(spec)) {
        const double a = std::sqrt(6.0 / static_cast<double>(ll.in + ll.out));
        for (std::size_t i = 0; i < ll.in * ll.out; ++i)
            w.flat[ll.w_off + i] = rng.uniform(-a, a);
        // biases stay zero
    }
}

void gaussian_init(const ModelSpec& spec, Weights& w, double std_dev, Rng& rng) {
    w.flat.resize(spec.param_count());
    for (double& v : w.flat) v = std_dev * rng.normal();
}

// In-place Cholesky of a small SPD matrix (row-major, n x n); lower factor.
void cholesky(std::vector<double>& m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
            if (i == j) {
                if (s <= 0.0)
                    throw NumericalError("input covariance is not positive definite");
                m[i * n + i] = std::sqrt(s);
            } else {
                m[i * n + j] = s / m[j * n + j];
            }
        }
        for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = 0.0;
    }
}

}  // namespace

TaskBundle make_teacher_student(const TeacherStudentOpts& o) {
    if (o.input_dim <= 0 || o.teacher_hidden <= 0 || o.student_hidden <= 0 ||
        o.output_dim <= 0 || o.n_samples == 0)
        throw DomainError("make_teacher_student: dimensions must be positive");

    ModelSpec teacher;
    teacher.layer_sizes = {o.input_dim, o.teacher_hidden, o.output_dim};
    teacher.hidden_activation = o.activation;
    teacher.bias_flags = {1, 0};
    Weights tw;
    {
        Rng rng(Rng::mix(o.seed, kTeacherSalt));
        xavier_uniform(teacher, tw, rng);
    }

    TaskBundle b;
    b.spec.layer_sizes = {o.input_dim, o.student_hidden, o.output_dim};
    b.spec.hidden_activation = o.activation;
    b.spec.bias_flags = {1, 0};

    b.data.n_samples = o.n_samples;
    b.data.input_dim = static_cast<std::size_t>(o.input_dim);
    b.data.output_dim = static_cast<std::size_t>(o.output_dim);
    b.data.inputs.resize(o.n_samples * b.data.input_dim);
    {
        Rng rng(Rng::mix(o.seed, kDataSalt));
        for (double& v : b.data.inputs) v = rng.normal();
    }
    b.data.targets = predict(teacher, tw, b.data.inputs.data(), o.n_samples);

    Rng rng(Rng::mix(o.seed, kStudentSalt));
    gaussian_init(b.spec, b.w0, o.student_init_std, rng);
    return b;
}

TaskBundle make_two_gaussian(double d_sep, double variance, std::size_t n,
                             std::uint64_t seed) {
    if (!(variance > 0.0)) throw DomainError("make_two_gaussian: variance must be positive");
    if (n == 0) throw DomainError("make_two_gaussian: need samples");
    TaskBundle b;
    b.spec.layer_sizes = {1, 1};
    b.spec.hidden_activation = Activation::Identity;
    b.spec.bias_flags = {0};
    b.w0.flat = {0.0};
    b.data.n_samples = n;
    b.data.input_dim = 1;
    b.data.output_dim = 1;
    b.data.inputs.resize(n);
    b.data.targets.resize(n);
    Rng rng(Rng::mix(seed, kDataSalt));
    const double sd = std::sqrt(variance);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = rng.uniform() < 0.5 ? -1.0 : 1.0;
        b.data.targets[i] = y;
        b.data.inputs[i] = y * d_sep + sd * rng.normal();
    }
    return b;
}

LinRegBundle make_linear_regression(std::size_t dim, double d_init, double sigma2,
                                    std::size_t n, std::uint64_t seed) {
    if (dim == 0) throw DomainError("make_linear_regression: dim must be positive");
    if (!(sigma2 > 0.0)) throw DomainError("make_linear_regression: sigma2 must be positive");
    if (!(d_init >= 0.0)) throw DomainError("make_linear_regression: d_init must be nonnegative");
    if (n < dim + 1) throw DomainError("make_linear_regression: need more samples than dims");

    LinRegBundle b;
    b.spec.layer_sizes = {static_cast<int>(dim), 1};
    b.spec.hidden_activation = Activation::Identity;
    b.spec.bias_flags = {0};
    b.w0.flat.assign(dim, 0.0);

    Rng rng(Rng::mix(seed, kDataSalt));
    std::vector<double> x(n * dim);
    for (double& v : x) v = rng.normal();

    // Whiten to an exact empirical second moment sigma2 * I: with C = X^T X / n
    // = L L^T, the rows x <- sigma * L^{-T} x satisfy X'^T X' / n = sigma2 I.
    std::vector<double> c(dim * dim, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                c[i * dim + j] += x[s * dim + i] * x[s * dim + j];
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            c[i * dim + j] /= static_cast<double>(n);
            c[j * dim + i] = c[i * dim + j];
        }
    cholesky(c, dim);
    const double sigma = std::sqrt(sigma2);
    std::vector<double> row(dim);
    for (std::size_t s = 0; s < n; ++s) {
        double* xs = x.data() + s * dim;
        // z = L^{-1} x by forward substitution
        for (std::size_t i = 0; i < dim; ++i) {
            double v = xs[i];
            for (std::size_t k = 0; k < i; ++k) v -= c[i * dim + k] * row[k];
            row[i] = v / c[i * dim + i];
        }
        for (std::size_t i = 0; i < dim; ++i) xs[i] = sigma * row[i];
    }

    Rng wrng(Rng::mix(seed, kTeacherSalt));
    std::vector<double> wstar(dim, 0.0);
    if (d_init > 0.0) {
        double norm2 = 0.0;
        for (double& v : wstar) {
            v = wrng.normal();
            norm2 += v * v;
        }
        const double f = d_init / std::sqrt(norm2);
        for (double& v : wstar) v *= f;
    }

    b.data.n_samples = n;
    b.data.input_dim = dim;
    b.data.output_dim = 1;
    b.data.inputs = std::move(x);
    b.data.targets.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        double y = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            y += b.data.inputs[s * dim + i] * wstar[i];
        b.data.targets[s] = y;
    }

    b.task.sigma2 = sigma2;
    b.task.d = d_init;
    return b;
}

TaskData load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path,
                    const std::optional<MnistSubset>& subset) {
    const IdxImages imgs = read_idx_images(images_path);
    const std::vector<std::uint8_t> labels = read_idx_labels(labels_path);
    if (imgs.count != labels.size())
        throw FormatError("MNIST: image and label counts differ");
    if (imgs.rows % 2 != 0 || imgs.cols % 2 != 0)
        throw FormatError("MNIST: image dimensions must be even for 2x2 pooling");

    const std::size_t pr = imgs.rows / 2, pc = imgs.cols / 2;
    const std::size_t in_dim = pr * pc;
    constexpr std::size_t n_classes = 10;

    std::vector<std::size_t> per_class(n_classes, 0);
    std::vector<std::size_t> keep;
    const std::size_t cap_pc = subset ? subset->max_per_class : 0;
    const std::size_t cap_total = subset ? subset->max_total : 0;
    for (std::size_t i = 0; i < imgs.count; ++i) {
        if (labels[i] >= n_classes)
            throw FormatError("MNIST: label out of range at sample " + std::to_string(i));
        if (cap_pc && per_class[labels[i]] >= cap_pc) continue;
        if (cap_total && keep.size() >= cap_total) break;
        ++per_class[labels[i]];
        keep.push_back(i);
    }

    TaskData td;
    td.n_samples = keep.size();
    td.input_dim = in_dim;
    td.output_dim = n_classes;
    td.inputs.assign(td.n_samples * in_dim, 0.0);
    td.targets.assign(td.n_samples * n_classes, 0.0);
    td.class_ids.resize(td.n_samples);
    for (std::size_t s = 0; s < keep.size(); ++s) {
        const std::size_t i = keep[s];
        const std::uint8_t* px = imgs.pixels.data() + i * imgs.rows * imgs.cols;
        double* out = td.inputs.data() + s * in_dim;
        for (std::size_t r = 0; r < pr; ++r)
            for (std::size_t col = 0; col < pc; ++col) {
                const std::size_t r0 = 2 * r, c0 = 2 * col;
                const double acc = px[r0 * imgs.cols + c0] + px[r0 * imgs.cols + c0 + 1] +
                                   px[(r0 + 1) * imgs.cols + c0] +
                                   px[(r0 + 1) * imgs.cols + c0 + 1];
                out[r * pc + col] = acc / (4.0 * 255.0);
            }
        td.targets[s * n_classes + labels[i]] = 1.0;
        td.class_ids[s] = labels[i];
    }
    return td;
}

namespace {

// 7x7 glyph masks, visually distinct per class.
const char* kGlyphs[10][7] = {
    {".XXXX..", "X....X.", "X....X.", "X....X.", "X....X.", "X....X.", ".XXXX.."},
    {"...X...", "..XX...", "...X...", "...X...", "...X...", "...X...", ".XXXXX."},
    {".XXXX..", "X....X.", ".....X.", "...XX..", "..X....", ".X.....", "XXXXXX."},
    {"XXXXX..", ".....X.", ".....X.", "..XXX..", ".....X.", ".....X.", "XXXXX.."},
    {"X...X..", "X...X..", "X...X..", "XXXXXX.", "....X..", "....X..", "....X.."},
    {"XXXXXX.", "X......", "XXXXX..", ".....X.", ".....X.", "X....X.", ".XXXX.."},
    {".XXXX..", "X......", "X......", "XXXXX..", "X....X.", "X....X.", ".XXXX.."},
    {"XXXXXX.", ".....X.", "....X..", "...X...", "..X....", "..X....", "..X...."},
    {".XXXX..", "X....X.", "X....X.", ".XXXX..", "X....X.", "X....X.", ".XXXX.."},
    {".XXXX..", "X....X.", "X....X.", ".XXXXX.", ".....X.", ".....X.", ".XXXX.."},
};

}  // namespace

void write_synthetic_digits_idx(const std::filesystem::path& dir,
                                std::size_t per_class, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    constexpr std::size_t side = 28;
    IdxImages imgs;
    imgs.count = 10 * per_class;
    imgs.rows = side;
    imgs.cols = side;
    imgs.pixels.assign(imgs.count * side * side, 0);
    std::vector<std::uint8_t> labels(imgs.count);
    Rng rng(seed);
    std::size_t s = 0;
    for (std::size_t rep = 0; rep < per_class; ++rep) {
        for (int cls = 0; cls < 10; ++cls, ++s) {
            labels[s] = static_cast<std::uint8_t>(cls);
            std::uint8_t* px = imgs.pixels.data() + s * side * side;
            const int dx = static_cast<int>(rng.index(5)) - 2;
            const int dy = static_cast<int>(rng.index(5)) - 2;
            const double intensity = 160.0 + 95.0 * rng.uniform();
            for (std::size_t r = 0; r < side; ++r) {
                for (std::size_t c = 0; c < side; ++c) {
                    const int gr = (static_cast<int>(r) - dy) / 4;
                    const int gc = (static_cast<int>(c) - dx) / 4;
                    double v = 0.0;
                    if (gr >= 0 && gr < 7 && gc >= 0 && gc < 7 &&
                        kGlyphs[cls][gr][gc] == 'X')
                        v = intensity;
                    if (rng.uniform() < 0.15) v += 30.0 * rng.uniform();
                    px[r * side + c] =
                        static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, v)));
                }
            }
        }
    }
    write_idx_images(dir / "train-images-idx3-ubyte", imgs);
    write_idx_labels(dir / "train-labels-idx1-ubyte", labels);
}

void save_dataset(const std::filesystem::path& path, const TaskData& data) {
    std::ofstream f(path);
    if (!f) throw Error("save_dataset: cannot open " + path.string());
    f << "lrsched-dataset v1\n" << std::setprecision(17);
    auto block = [&f](const char* tag, const std::vector<double>& m, std::size_t rows,
                      std::size_t cols) {
        f << tag << ' ' << rows << ' ' << cols << '\n';
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                if (j) f << ' ';
                f << m[i * cols + j];
            }
            f << '\n';
        }
    };
    block("inputs", data.inputs, data.n_samples, data.input_dim);
    block("targets", data.targets, data.n_samples, data.output_dim);
    f << "classes " << data.class_ids.size() << '\n';
    for (std::size_t i = 0; i < data.class_ids.size(); ++i) {
        if (i) f << ' ';
        f << data.class_ids[i];
    }
    f << '\n';
    if (!f) throw Error("save_dataset: write failed for " + path.string());
}

TaskData load_dataset(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("load_dataset: cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != "lrsched-dataset v1")
        throw FormatError("load_dataset: bad magic line in " + path.string());
    TaskData td;
    auto block = [&f, &path](const char* tag, std::vector<double>& m, std::size_t& rows,
                             std::size_t& cols) {
        std::string key;
        if (!(f >> key >> rows >> cols) || key != tag)
            throw FormatError("load_dataset: expected block '" + std::string(tag) +
                              "' in " + path.string());
        m.resize(rows * cols);
        for (double& v : m)
            if (!(f >> v)) throw FormatError("load_dataset: truncated block '" +
                                             std::string(tag) + "'");
    };
    std::size_t r1 = 0, c1 = 0, r2 = 0, c2 = 0;
    block("inputs", td.inputs, r1, c1);
    block("targets", td.targets, r2, c2);
    if (r1 != r2) throw FormatError("load_dataset: row count mismatch");
    td.n_samples = r1;
    td.input_dim = c1;
    td.output_dim = c2;
    std::string key;
    std::size_t nc = 0;
    if (f >> key >> nc) {
        if (key != "classes") throw FormatError("load_dataset: expected 'classes'");
        td.class_ids.resize(nc);
        for (auto& v : td.class_ids)
            if (!(f >> v)) throw FormatError("load_dataset: truncated class ids");
    }
    return td;
}

}  // namespace lrsched

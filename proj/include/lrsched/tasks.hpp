#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "lrsched/controllers.hpp"
#include "lrsched/model.hpp"

namespace lrsched {

struct TaskBundle {
    ModelSpec spec;
    Weights w0;
    TaskData data;
};

struct TeacherStudentOpts {
    int input_dim = 4;
    int teacher_hidden = 10;
    int student_hidden = 10;
    int output_dim = 6;
    Activation activation = Activation::Tanh;
    std::size_t n_samples = 2048;
    std::uint64_t seed = 1;
    double student_init_std = 0.1;
};

// Teacher with Xavier-uniform weights labels Gaussian inputs; the student is
// initialized from a zero-mean Gaussian of configurable width.
TaskBundle make_teacher_student(const TeacherStudentOpts& opts);

// Labels y = +-1 equiprobable, scalar inputs x ~ N(y*d, variance); a single
// linear neuron under MSE.
TaskBundle make_two_gaussian(double d_sep, double variance, std::size_t n,
                             std::uint64_t seed);

struct LinRegBundle {
    ModelSpec spec;
    Weights w0;
    TaskData data;
    PerceptronTask task;  // sigma2 and d filled; beta/T completed by the caller
};

// Realizable linear regression: w0 = 0, ||w*|| = d_init, inputs whitened so the
// empirical second moment is exactly sigma2 * I (matches the closed forms).
LinRegBundle make_linear_regression(std::size_t dim, double d_init, double sigma2,
                                    std::size_t n, std::uint64_t seed);

inline PerceptronTask complete_task(PerceptronTask t, const RewardParams& p) {
    t.beta = p.beta;
    t.T = p.horizon_T;
    return t;
}

struct MnistSubset {
    std::size_t max_per_class = 0;  // 0 = unlimited
    std::size_t max_total = 0;      // 0 = unlimited
};

// IDX images/labels -> normalized [0,1], 2x2 average-pooled inputs with
// one-hot targets and class ids.
TaskData load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path,
                    const std::optional<MnistSubset>& subset = std::nullopt);

// Versioned line-delimited numeric cache (same container family as the
// memory-store file).
void save_dataset(const std::filesystem::path& path, const TaskData& data);
TaskData load_dataset(const std::filesystem::path& path);

// Deterministic 10-class glyph dataset in IDX format (28x28), used when no
// real MNIST files are available. Writes train-images-idx3-ubyte and
// train-labels-idx1-ubyte under dir.
void write_synthetic_digits_idx(const std::filesystem::path& dir,
                                std::size_t per_class, std::uint64_t seed);

}  // namespace lrsched

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <dancestyle/rng.hpp>
#include <dancestyle/sequence.hpp>

namespace test_support {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dancestyle_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// COCO-17 sequence with every coordinate drawn uniformly from [-1, 1].
inline dancestyle::MotionSequence random_coco_sequence(std::size_t frames, int dims, std::uint64_t seed) {
    dancestyle::Rng rng(seed);
    dancestyle::MotionSequence seq;
    seq.video_id = "rand_" + std::to_string(seed);
    seq.fps = 60.0;
    seq.dims = dims;
    seq.joint_names = dancestyle::coco_joint_names();
    seq.coords.resize(frames * seq.joint_names.size() * static_cast<std::size_t>(dims));
    for (double& c : seq.coords) c = rng.uniform(-1.0, 1.0);
    return seq;
}

inline std::vector<double> random_signal(std::size_t n, dancestyle::Rng& rng) {
    std::vector<double> out(n);
    for (double& v : out) v = rng.uniform(-1.0, 1.0);
    return out;
}

}  // namespace test_support

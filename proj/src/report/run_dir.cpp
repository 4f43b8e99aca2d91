#include <cerrno>
#include <csignal>
#include <fstream>
#include <string>

#include <fcntl.h>
#include <unistd.h>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/report/pipeline.hpp"

namespace infodensity::report {

namespace {

bool try_create_lock(const std::filesystem::path& lock) {
    const int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) return false;
    const auto pid = std::to_string(::getpid()) + "\n";
    const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
    return written == static_cast<ssize_t>(pid.size());
}

// A lock whose owner process is gone can be taken over.
bool lock_is_stale(const std::filesystem::path& lock) {
    std::ifstream in(lock);
    long pid = 0;
    if (!(in >> pid) || pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) != 0 && errno == ESRCH;
}

} // namespace

RunDir::RunDir(std::filesystem::path root) : root_(std::move(root)), lock_(root_ / "run.lock") {
    for (const auto& sub : {manifest(), records(), features(), labels(), reports()})
        std::filesystem::create_directories(sub);
    if (!try_create_lock(lock_)) {
        if (lock_is_stale(lock_)) {
            std::filesystem::remove(lock_);
            if (try_create_lock(lock_)) return;
        }
        throw ValidationError(fmt::format("run directory {} is locked by another process ({})", root_.string(),
                                          lock_.string()));
    }
}

RunDir::~RunDir() {
    std::error_code ec;
    std::filesystem::remove(lock_, ec);
}

Config RunDir::load_config() const {
    if (std::filesystem::exists(config_path())) return Config::load(config_path());
    return Config{};
}

void RunDir::save_config(const Config& config) const {
    std::string text;
    for (const auto& [k, v] : config.values()) text += k + " = " + v + "\n";
    write_text_file(config_path(), text);
}

} // namespace infodensity::report

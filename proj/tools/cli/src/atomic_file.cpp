#include "abc_cli/atomic_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "abc/errors.hpp"

namespace abc::cli {

namespace {

void sync_path(const std::filesystem::path& path, bool directory) {
    const int fd = ::open(path.c_str(), directory ? O_RDONLY | O_DIRECTORY : O_RDONLY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

}  // namespace

void write_atomically(const std::filesystem::path& target,
                      const std::function<void(std::ostream&)>& produce) {
    std::filesystem::path dir = target.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io_error", "cannot open " + tmp.string() + " for writing");
        try {
            produce(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("io_error", "write failed for " + tmp.string());
        }
    }
    sync_path(tmp, false);
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("io_error", "cannot rename into " + target.string() + ": " + ec.message());
    }
    sync_path(dir.empty() ? std::filesystem::path(".") : dir, true);
}

void write_atomically(const std::filesystem::path& target, std::string_view contents) {
    write_atomically(target, [&](std::ostream& out) { out.write(contents.data(), static_cast<std::streamsize>(contents.size())); });
}

}  // namespace abc::cli

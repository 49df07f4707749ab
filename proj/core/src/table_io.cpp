#include "abc/table_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>

#include "abc/errors.hpp"
#include "abc/format.hpp"

namespace abc {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

namespace {

constexpr std::array<char, 4> kMagic{'A', 'B', 'C', 'T'};

template <class UInt>
void put_le(std::ostream& out, UInt value) {
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
    }
    out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get_le(std::istream& in) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw InvalidArgument("table file truncated");
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) value |= static_cast<UInt>(bytes[i]) << (8 * i);
    return value;
}

void put_column(std::ostream& out, const std::vector<double>& rows, std::size_t width,
                std::size_t col) {
    for (std::size_t i = col; i < rows.size(); i += width) {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(rows[i]));
    }
}

}  // namespace

void write_table_binary(std::ostream& out, const ReferenceTable& table) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kTableFormatVersion);
    put_le<std::uint64_t>(out, table.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.param_dim()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.summary_dim()));
    put_le<std::uint64_t>(out, table.seed());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.model_id().size()));
    out.write(table.model_id().data(), static_cast<std::streamsize>(table.model_id().size()));
    for (std::size_t c = 0; c < table.param_dim(); ++c) put_column(out, table.thetas(), table.param_dim(), c);
    for (std::size_t c = 0; c < table.summary_dim(); ++c) {
        put_column(out, table.summaries(), table.summary_dim(), c);
    }
    if (!out) throw Error("io_error", "failed writing reference table");
}

ReferenceTable read_table_binary(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw InvalidArgument("not a reference table file (bad magic)");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kTableFormatVersion) {
        throw InvalidArgument("unsupported table format version " + std::to_string(version));
    }
    const auto n = get_le<std::uint64_t>(in);
    const auto p = get_le<std::uint32_t>(in);
    const auto m = get_le<std::uint32_t>(in);
    const auto seed = get_le<std::uint64_t>(in);
    const auto id_len = get_le<std::uint32_t>(in);
    if (p == 0 || m == 0 || id_len > 4096) throw InvalidArgument("corrupt table header");
    std::string id(id_len, '\0');
    in.read(id.data(), id_len);
    if (!in) throw InvalidArgument("table file truncated");
    std::vector<double> thetas(n * p);
    std::vector<double> summaries(n * m);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t i = 0; i < n; ++i) thetas[i * p + c] = std::bit_cast<double>(get_le<std::uint64_t>(in));
    }
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            summaries[i * m + c] = std::bit_cast<double>(get_le<std::uint64_t>(in));
        }
    }
    return ReferenceTable(std::move(id), seed, p, m, std::move(thetas), std::move(summaries));
}

void write_table_csv(std::ostream& out, const ReferenceTable& table) {
    const std::size_t p = table.param_dim();
    const std::size_t m = table.summary_dim();
    for (std::size_t c = 0; c < p; ++c) out << (c ? "," : "") << "theta_" << c;
    for (std::size_t c = 0; c < m; ++c) out << ",s_" << c;
    out << "\r\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto theta = table.theta(i);
        const auto s = table.summary(i);
        for (std::size_t c = 0; c < p; ++c) out << (c ? "," : "") << format_double(theta[c]);
        for (std::size_t c = 0; c < m; ++c) out << ',' << format_double(s[c]);
        out << "\r\n";
    }
}

}  // namespace abc

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "specbudget/errors.hpp"
#include "specbudget/matrix.hpp"

// On-disk matrix exchange. The binary EAPM format is little-endian with an
// explicit dtype so features exported from any encoder can be replayed
// bit-exactly; CSV exists for hand-written fixtures. Files with a ".csv"
// extension parse as CSV, everything else as EAPM.
//
//   offset  size  field
//   0       4     magic "EAPM"
//   4       4     version (u32 LE), currently 1
//   8       4     n_v (u32 LE)
//   12      4     d_v (u32 LE)
//   16      1     dtype: 0 = float32, 1 = float64
//   17      -     payload, row-major, little-endian

namespace specbudget::io {

enum class MatrixDType : std::uint8_t { Float32 = 0, Float64 = 1 };

inline constexpr char kMagic[4] = {'E', 'A', 'P', 'M'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 17;

namespace detail {

inline void put_u32le(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
    buf.push_back(static_cast<char>((v >> 16) & 0xFF));
    buf.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline std::uint32_t get_u32le(const char* p) {
    const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])); };
    return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

inline std::uint64_t get_u64le(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

inline void put_u64le(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline bool is_csv(const std::filesystem::path& path) {
    return path.extension() == ".csv";
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());
    return data;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failure on " + path.string());
}

inline FeatureMatrix parse_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        std::vector<double> row;
        std::size_t field_no = 0;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) comma = line.size();
            std::string_view field = line.substr(start, comma - start);
            ++field_no;
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
                field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
                field.remove_suffix(1);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw ParseError(origin + ": line " + std::to_string(line_no) + ", field " +
                                 std::to_string(field_no) + ": not a number: '" +
                                 std::string(field) + "'");
            row.push_back(value);
            if (comma == line.size()) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(origin + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " fields, got " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(origin + ": no data rows");

    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return FeatureMatrix(std::move(m));
}

inline std::string format_csv(const FeatureMatrix& m) {
    std::string out;
    out.reserve(static_cast<std::size_t>(m.rows() * m.cols()) * 12);
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const int len = std::snprintf(buf, sizeof(buf), "%.17g", m.data()(i, j));
            if (j > 0) out.push_back(',');
            out.append(buf, static_cast<std::size_t>(len));
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace detail

inline void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path,
                         MatrixDType dtype = MatrixDType::Float64) {
    if (detail::is_csv(path)) {
        detail::write_file(path, detail::format_csv(m));
        return;
    }
    const std::uint64_t count = static_cast<std::uint64_t>(m.rows()) * static_cast<std::uint64_t>(m.cols());
    std::string buf;
    buf.reserve(kHeaderBytes + count * (dtype == MatrixDType::Float64 ? 8 : 4));
    buf.append(kMagic, 4);
    detail::put_u32le(buf, kFormatVersion);
    detail::put_u32le(buf, static_cast<std::uint32_t>(m.rows()));
    detail::put_u32le(buf, static_cast<std::uint32_t>(m.cols()));
    buf.push_back(static_cast<char>(dtype));

    const double* values = m.data().data(); // row-major contiguous
    if (dtype == MatrixDType::Float64) {
        for (std::uint64_t i = 0; i < count; ++i)
            detail::put_u64le(buf, std::bit_cast<std::uint64_t>(values[i]));
    } else {
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
            detail::put_u32le(buf, bits);
        }
    }
    detail::write_file(path, buf);
}

inline FeatureMatrix read_matrix(const std::filesystem::path& path) {
    const std::string data = detail::read_file(path);
    if (detail::is_csv(path))
        return detail::parse_csv(data, path.filename().string());

    if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0)
        throw BadMagic(path.string() + ": not an EAPM matrix file");
    if (data.size() < kHeaderBytes)
        throw TruncatedPayload(path.string() + ": header cut short at " +
                               std::to_string(data.size()) + " bytes");
    const std::uint32_t version = detail::get_u32le(data.data() + 4);
    if (version != kFormatVersion)
        throw BadVersion(path.string() + ": format version " + std::to_string(version) +
                         ", expected " + std::to_string(kFormatVersion));
    const std::uint32_t n_v = detail::get_u32le(data.data() + 8);
    const std::uint32_t d_v = detail::get_u32le(data.data() + 12);
    const std::uint8_t dtype_byte = static_cast<std::uint8_t>(data[16]);
    if (dtype_byte > 1)
        throw ParseError(path.string() + ": unknown dtype " + std::to_string(dtype_byte));
    if (n_v == 0 || d_v == 0)
        throw BadDims(path.string() + ": zero dimension in header");

    const MatrixDType dtype = static_cast<MatrixDType>(dtype_byte);
    const std::uint64_t count = static_cast<std::uint64_t>(n_v) * d_v;
    const std::uint64_t width = dtype == MatrixDType::Float64 ? 8 : 4;
    const std::uint64_t expected = count * width;
    const std::uint64_t actual = data.size() - kHeaderBytes;
    if (actual < expected)
        throw TruncatedPayload(path.string() + ": payload has " + std::to_string(actual) +
                               " bytes, header promises " + std::to_string(expected));
    if (actual > expected)
        throw ParseError(path.string() + ": " + std::to_string(actual - expected) +
                         " trailing bytes after payload");

    Matrix m(static_cast<Eigen::Index>(n_v), static_cast<Eigen::Index>(d_v));
    const char* p = data.data() + kHeaderBytes;
    if (dtype == MatrixDType::Float64) {
        for (std::uint64_t i = 0; i < count; ++i)
            m.data()[i] = std::bit_cast<double>(detail::get_u64le(p + i * 8));
    } else {
        for (std::uint64_t i = 0; i < count; ++i)
            m.data()[i] = static_cast<double>(
                std::bit_cast<float>(detail::get_u32le(p + i * 4)));
    }
    return FeatureMatrix(std::move(m));
}

} // namespace specbudget::io

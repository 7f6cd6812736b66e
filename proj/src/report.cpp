#include "sconv/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace sconv {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v)
{
    return cell(std::string_view(format_number(v)));
}

CsvWriter& CsvWriter::cell(std::size_t v)
{
    return cell(std::string_view(std::to_string(v)));
}

CsvWriter& CsvWriter::cell(std::string_view text)
{
    if (row_started_)
        out_ << ',';
    out_ << text;
    row_started_ = true;
    return *this;
}

void CsvWriter::end_row()
{
    out_ << '\n';
    row_started_ = false;
}

}  // namespace sconv

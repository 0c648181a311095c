#include "capprice/common/csv.hpp"

#include <charconv>
#include <fstream>

#include "capprice/common/error.hpp"

namespace capprice {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

CsvReader::CsvReader(const std::filesystem::path& path) : file_(path.string()) {
    std::ifstream in(path);
    if (!in) throw InputError(file_, 0, "", "cannot open file");
    std::string l;
    while (std::getline(in, l)) lines_.push_back(l);
}

bool CsvReader::next() {
    while (next_ < lines_.size()) {
        line_ = static_cast<int>(next_) + 1;
        const std::string& l = lines_[next_++];
        if (trim(l).empty()) continue;
        fields_ = split_csv_line(l);
        return true;
    }
    return false;
}

void CsvReader::expect_header(const std::vector<std::string>& columns) {
    if (!next()) fail("header", "empty file");
    if (fields_ != columns) {
        std::string want;
        for (const auto& c : columns) want += (want.empty() ? "" : ",") + c;
        fail("header", "expected header '" + want + "'");
    }
}

double CsvReader::number(std::size_t col, const std::string& field) const {
    if (col >= fields_.size()) fail(field, "missing column");
    const std::string& s = fields_[col];
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc{} || p != last) fail(field, "not a number: '" + s + "'");
    return v;
}

int CsvReader::integer(std::size_t col, const std::string& field) const {
    if (col >= fields_.size()) fail(field, "missing column");
    const std::string& s = fields_[col];
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        fail(field, "not an integer: '" + s + "'");
    return v;
}

void CsvReader::fail(const std::string& field, const std::string& message) const {
    throw InputError(file_, line_, field, message);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw InputError(path_, 0, "", "cannot open for writing");
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

}  // namespace capprice

#include "vlogcues/csv.hpp"

#include "vlogcues/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vlogcues::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) {
            current.line = record_line;
            records.push_back(std::move(current));
        }
        current = Record{};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started && field.empty()) {
                in_quotes = true;
                field_started = true;
            } else {
                field.push_back(c);
            }
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                break;
            }
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            record_line = line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw LoadError("line " + std::to_string(record_line) + ": unterminated quoted field");
    }
    if (!field.empty() || field_started || !current.fields.empty()) {
        end_record();
    }
    return records;
}

std::vector<Record> read_file(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

std::vector<Record> read_with_header(const std::filesystem::path& path,
                                     const std::vector<std::string>& header) {
    auto records = read_file(path);
    if (records.empty()) {
        throw LoadError(path.string() + ": missing header row");
    }
    auto first = records.front().fields;
    if (!first.empty() && first[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        first[0].erase(0, 3);
    }
    if (first != header) {
        throw LoadError(path.string() + ": unexpected header '" + join(first) + "', expected '" +
                        join(header) + "'");
    }
    records.erase(records.begin());
    for (const auto& r : records) {
        if (r.fields.size() != header.size()) {
            throw LoadError(path.string() + ":" + std::to_string(r.line) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(r.fields.size()));
        }
    }
    return records;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const Row& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out.push_back(',');
        }
        out += escape(fields[i]);
    }
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) {
        return "0";  // folds -0
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace vlogcues::csv

namespace vlogcues {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace vlogcues

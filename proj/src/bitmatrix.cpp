#include "circlet/bitmatrix.hpp"

#include <bit>
#include <fstream>
#include <string>

#include "circlet/errors.hpp"

namespace circlet {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_per_col_((rows + 63) / 64), words_(cols * words_per_col_, 0) {}

void BitMatrix::set(std::size_t r, std::size_t c, bool value) {
  std::uint64_t& w = words_[c * words_per_col_ + (r >> 6)];
  const std::uint64_t bit = std::uint64_t{1} << (r & 63);
  if (value)
    w |= bit;
  else
    w &= ~bit;
}

std::size_t BitMatrix::column_ones(std::size_t c) const {
  std::size_t total = 0;
  for (std::uint64_t w : column(c)) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string text;
  in.seekg(0, std::ios::end);
  text.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(text.data(), static_cast<std::streamsize>(text.size()));
  return text;
}

// One row of 0/1 tokens; returns false on a blank line (accepted only as a
// trailing newline artifact).
bool parse_row(const std::string& text, std::size_t& pos, std::size_t line_no,
               const std::string& path, std::vector<std::uint8_t>& out) {
  out.clear();
  const std::size_t n = text.size();
  if (pos >= n) return false;
  std::size_t end = text.find('\n', pos);
  if (end == std::string::npos) end = n;
  std::size_t stop = end;
  if (stop > pos && text[stop - 1] == '\r') --stop;
  if (stop == pos) {
    pos = end + 1;
    return false;
  }
  std::size_t tok = pos;
  while (tok < stop) {
    std::size_t comma = text.find(',', tok);
    if (comma == std::string::npos || comma > stop) comma = stop;
    if (comma - tok != 1 || (text[tok] != '0' && text[tok] != '1'))
      throw MalformedRow(path, line_no,
                         "expected 0 or 1, got \"" + text.substr(tok, comma - tok) + "\"");
    out.push_back(static_cast<std::uint8_t>(text[tok] - '0'));
    tok = comma + 1;
  }
  if (stop > pos && text[stop - 1] == ',')
    throw MalformedRow(path, line_no, "trailing comma");
  pos = end + 1;
  return true;
}

}  // namespace

BitMatrix load_binary_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string name = path.string();

  std::vector<std::uint8_t> row;
  std::vector<std::uint8_t> cells;
  std::size_t pos = 0, line_no = 0, rows = 0, cols = 0;
  while (pos < text.size()) {
    ++line_no;
    if (!parse_row(text, pos, line_no, name, row)) {
      for (std::size_t k = pos; k < text.size(); ++k)
        if (text[k] != '\n' && text[k] != '\r')
          throw MalformedRow(name, line_no, "blank line inside dataset");
      break;
    }
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw MalformedRow(name, line_no,
                         "expected " + std::to_string(cols) + " columns, got " +
                             std::to_string(row.size()));
    }
    cells.insert(cells.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw EmptyFile(name);

  BitMatrix data(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (cells[r * cols + c]) data.set(r, c, true);
  return data;
}

void save_binary_csv(const BitMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  std::string line;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (c) line.push_back(',');
      line.push_back(data.get(r, c) ? '1' : '0');
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace circlet

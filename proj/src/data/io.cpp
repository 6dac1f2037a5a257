#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fairbandit/binary.hpp"
#include "fairbandit/data/dataset.hpp"
#include "fairbandit/errors.hpp"

namespace fairbandit::data {


std::size_t embedding_file_size(std::size_t n, std::size_t d) {
  return kEmbeddingHeaderBytes + n * (d * 4 + 2 + 2);
}

std::vector<std::uint8_t> encode_embeddings(const Dataset& ds) {
  if (ds.n_classes() > 65536 || ds.n_groups() > 65536)
    throw ConfigError("labels do not fit the u16 record fields");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(embedding_file_size(static_cast<std::size_t>(ds.size()),
                                    static_cast<std::size_t>(ds.dim())));
  ByteWriter w(bytes);
  for (char c : kEmbeddingMagic) bytes.push_back(static_cast<std::uint8_t>(c));
  w.put<std::uint16_t>(kEmbeddingVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.dim()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.n_classes()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.n_groups()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index k = 0; k < ds.dim(); ++k)
      w.put<float>(static_cast<float>(ds.contexts()(k, i)));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(ds.class_of(i)));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(ds.group_of(i)));
  }
  return bytes;
}

Dataset decode_embeddings(const std::vector<std::uint8_t>& bytes, std::string provenance) {
  for (std::size_t i = 0; i < kEmbeddingMagic.size(); ++i) {
    if (i >= bytes.size()) throw ParseError("truncated file while reading magic", i);
    if (bytes[i] != static_cast<std::uint8_t>(kEmbeddingMagic[i]))
      throw ParseError("bad magic: expected \"FCB1\"", 0);
  }
  ByteReader r(bytes);
  r.skip(kEmbeddingMagic.size());
  const std::size_t version_offset = r.offset();
  const auto version = r.get<std::uint16_t>("version");
  if (version != kEmbeddingVersion)
    throw ParseError("unsupported version " + std::to_string(version), version_offset);
  const auto n = r.get<std::uint32_t>("n");
  const auto d = r.get<std::uint32_t>("d");
  const auto n_classes = r.get<std::uint32_t>("n_classes");
  const auto n_groups = r.get<std::uint32_t>("n_groups");
  if (n == 0) throw ParseError("dataset must be nonempty", 6);
  if (n_classes == 0 || n_groups == 0)
    throw ParseError("n_classes and n_groups must be positive", 14);
  const std::size_t expected = embedding_file_size(n, d);
  if (bytes.size() < expected)
    throw ParseError("truncated file: expected " + std::to_string(expected) + " bytes, have " +
                         std::to_string(bytes.size()),
                     bytes.size());
  if (bytes.size() > expected)
    throw ParseError("trailing bytes after last record", expected);

  Eigen::MatrixXd contexts(d, n);
  std::vector<int> classes(n), groups(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t k = 0; k < d; ++k) contexts(k, i) = static_cast<double>(r.get<float>("context"));
    const std::size_t label_offset = r.offset();
    const auto cls = r.get<std::uint16_t>("class");
    const auto group = r.get<std::uint16_t>("group");
    if (cls >= n_classes)
      throw ParseError("record " + std::to_string(i) + ": class " + std::to_string(cls) +
                           " out of range",
                       label_offset);
    if (group >= n_groups)
      throw ParseError("record " + std::to_string(i) + ": group " + std::to_string(group) +
                           " out of range",
                       label_offset + 2);
    classes[i] = cls;
    groups[i] = group;
  }
  return Dataset(std::move(contexts), std::move(classes), std::move(groups),
                 static_cast<int>(n_classes), static_cast<int>(n_groups), std::move(provenance));
}

void save_embeddings(const Dataset& ds, const std::filesystem::path& path) {
  const auto bytes = encode_embeddings(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Dataset load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_embeddings(bytes, "file:" + path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<int> classes, groups;
  std::string line;
  std::size_t line_no = 0;
  std::size_t byte_offset = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = byte_offset;
    byte_offset += line.size() + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line_no == 1 && !cells.empty() && cells.back() == "group") {
      if (cells.size() < 3 || cells[cells.size() - 2] != "class")
        throw ParseError("CSV header must end with class,group", line_start);
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width || width < 3)
      throw ParseError("CSV line " + std::to_string(line_no) + " has " +
                           std::to_string(cells.size()) + " columns, expected " +
                           std::to_string(width),
                       line_start);
    std::vector<double> features;
    try {
      for (std::size_t k = 0; k + 2 < cells.size(); ++k) features.push_back(std::stod(cells[k]));
      classes.push_back(std::stoi(cells[width - 2]));
      groups.push_back(std::stoi(cells[width - 1]));
    } catch (const std::exception&) {
      throw ParseError("CSV line " + std::to_string(line_no) + ": unparsable value", line_start);
    }
    if (classes.back() < 0 || groups.back() < 0)
      throw ParseError("CSV line " + std::to_string(line_no) + ": negative label", line_start);
    rows.push_back(std::move(features));
  }
  if (rows.empty()) throw ParseError("CSV file has no data rows", byte_offset);
  const auto d = static_cast<Eigen::Index>(width - 2);
  Eigen::MatrixXd contexts(d, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index k = 0; k < d; ++k) contexts(k, static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(k)];
  const int n_classes = *std::max_element(classes.begin(), classes.end()) + 1;
  const int n_groups = *std::max_element(groups.begin(), groups.end()) + 1;
  return Dataset(std::move(contexts), std::move(classes), std::move(groups), n_classes,
                 std::max(n_groups, 2), "csv:" + path.string());
}

}  // namespace fairbandit::data

// Copyright 2026 The weldqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// PASCAL VOC annotation documents, one XML file per image, in the layout
// labelImg writes. VOC pixel coordinates are 1-based and inclusive; inside
// the library boxes are 0-based and continuous, so on load
//   (xmin, ymin, xmax, ymax) -> (xmin - 1, ymin - 1, xmax, ymax)
// and on write the inverse is applied after round-half-up.
#pragma once

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/png_io.hpp"

namespace weldqa {

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline long voc_round(double v) { return static_cast<long>(std::floor(v + 0.5)); }

inline void check_image_readable(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") {
    read_png_info(p);
    return;
  }
  std::ifstream in(p, std::ios::binary);
  if (!in || in.peek() == std::ifstream::traits_type::eof()) {
    throw IoError("cannot read image '" + p.string() + "'");
  }
}

}  // namespace detail

struct VocLoadOptions {
  // Check that each referenced image file exists and can be opened.
  bool check_images = true;
};

// Reads one VOC document. `image_dir` is where the referenced image lives.
inline void parse_voc_document(const std::filesystem::path& xml_path,
                               const std::filesystem::path& image_dir,
                               Dataset& out,
                               std::vector<std::string>* warnings = nullptr,
                               const VocLoadOptions& opts = {}) {
  namespace pt = boost::property_tree;
  const std::string name = xml_path.filename().string();
  pt::ptree doc;
  try {
    pt::read_xml(xml_path.string(), doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(name + ": malformed annotation document: " + e.message());
  }
  const auto root = doc.get_child_optional("annotation");
  if (!root) throw ParseError(name + ": missing <annotation> root element");
  const auto size = root->get_child_optional("size");
  if (!size) throw ParseError(name + ": missing <size> element");

  ImageRecord rec;
  rec.image_id = xml_path.stem().string();
  try {
    rec.width = size->get<int>("width");
    rec.height = size->get<int>("height");
    rec.channels = size->get<int>("depth", 1);
  } catch (const pt::ptree_error& e) {
    throw ParseError(name + ": bad <size> element: " + e.what());
  }
  if (rec.width <= 0 || rec.height <= 0) {
    throw ParseError(name + ": image size must be positive");
  }
  if (rec.channels != 1 && rec.channels != 3) {
    throw ParseError(name + ": depth must be 1 or 3, got " +
                     std::to_string(rec.channels));
  }
  const std::string filename = root->get<std::string>("filename", "");
  if (filename.empty()) throw ParseError(name + ": missing <filename> element");
  rec.file_path = image_dir / filename;
  if (opts.check_images) detail::check_image_readable(rec.file_path);

  std::size_t object_index = 0;
  for (const auto& [tag, obj] : *root) {
    if (tag != "object") continue;
    const std::string where =
        name + ": object " + std::to_string(object_index++);
    Annotation a;
    a.image_id = rec.image_id;
    a.label = obj.get<std::string>("name", "");
    if (a.label.empty()) throw ParseError(where + ": missing <name>");
    try {
      const auto& bb = obj.get_child("bndbox");
      a.box = {bb.get<double>("xmin") - 1.0, bb.get<double>("ymin") - 1.0,
               bb.get<double>("xmax"), bb.get<double>("ymax")};
    } catch (const pt::ptree_error& e) {
      throw ParseError(where + ": bad <bndbox>: " + e.what());
    }
    if (!a.box.valid()) throw ParseError(where + ": box corners out of order");
    const auto clipped = clip(a.box, rec.width, rec.height);
    if (!clipped) {
      if (warnings) warnings->push_back(where + ": box outside image, dropped");
      continue;
    }
    if (*clipped != a.box && warnings) {
      warnings->push_back(where + ": box clipped to image bounds");
    }
    a.box = *clipped;
    out.annotations.push_back(std::move(a));
  }
  out.images.push_back(std::move(rec));
}

// Loads every *.xml in `directory` (sorted by file name). Images are
// expected next to the annotation files. A missing directory is an error;
// an empty one yields an empty dataset.
inline Dataset load_voc(const std::filesystem::path& directory,
                        std::vector<std::string>* warnings = nullptr,
                        const VocLoadOptions& opts = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw IoError("dataset directory '" + directory.string() + "' not found");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(directory)) {
    if (e.is_regular_file() && e.path().extension() == ".xml") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  Dataset d;
  for (const auto& f : files) parse_voc_document(f, directory, d, warnings, opts);
  d.validate();
  return d;
}

// Serializes one image's annotations. Coordinates are rounded half-up to
// integers and shifted to the 1-based convention.
inline std::string format_voc(const ImageRecord& im,
                              const std::vector<Annotation>& anns,
                              const std::string& folder) {
  using detail::voc_round;
  using detail::xml_escape;
  std::ostringstream o;
  o << "<annotation>\n"
    << "\t<folder>" << xml_escape(folder) << "</folder>\n"
    << "\t<filename>" << xml_escape(im.file_path.filename().string())
    << "</filename>\n"
    << "\t<source>\n\t\t<database>Unknown</database>\n\t</source>\n"
    << "\t<size>\n"
    << "\t\t<width>" << im.width << "</width>\n"
    << "\t\t<height>" << im.height << "</height>\n"
    << "\t\t<depth>" << im.channels << "</depth>\n"
    << "\t</size>\n"
    << "\t<segmented>0</segmented>\n";
  for (const auto& a : anns) {
    o << "\t<object>\n"
      << "\t\t<name>" << xml_escape(a.label) << "</name>\n"
      << "\t\t<pose>Unspecified</pose>\n"
      << "\t\t<truncated>0</truncated>\n"
      << "\t\t<difficult>0</difficult>\n"
      << "\t\t<bndbox>\n"
      << "\t\t\t<xmin>" << voc_round(a.box.x_min) + 1 << "</xmin>\n"
      << "\t\t\t<ymin>" << voc_round(a.box.y_min) + 1 << "</ymin>\n"
      << "\t\t\t<xmax>" << voc_round(a.box.x_max) << "</xmax>\n"
      << "\t\t\t<ymax>" << voc_round(a.box.y_max) << "</ymax>\n"
      << "\t\t</bndbox>\n"
      << "\t</object>\n";
  }
  o << "</annotation>\n";
  return o.str();
}

// Writes <image_id>.xml for every image in `d`. Image files themselves are
// not touched; each document's <filename> is the record's file name.
inline void write_voc(const Dataset& d, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create directory '" + directory.string() +
                  "': " + ec.message());
  }
  const std::string folder = directory.filename().empty()
                                 ? directory.parent_path().filename().string()
                                 : directory.filename().string();
  for (const auto& im : d.images) {
    const fs::path file = directory / (im.image_id + ".xml");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + file.string() + "'");
    out << format_voc(im, d.annotations_for(im.image_id), folder);
    if (!out) throw IoError("write failed for '" + file.string() + "'");
  }
}

}  // namespace weldqa

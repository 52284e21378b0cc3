#include "svgr/svg_document.h"

#include <cstdint>
#include <string>

#include "svgr/error.h"
#include "text_util.h"

namespace svgr {

const std::string* SvgElement::attribute(std::string_view name) const {
  for (const auto& [key, value] : attributes) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::string_view local_name(std::string_view qualified) {
  auto colon = qualified.find(':');
  return colon == std::string_view::npos ? qualified : qualified.substr(colon + 1);
}

std::optional<ViewBox> parse_view_box(std::string_view value) {
  auto nums = detail::parse_number_list(value);
  if (!nums || nums->size() != 4) return std::nullopt;
  ViewBox vb{(*nums)[0], (*nums)[1], (*nums)[2], (*nums)[3]};
  if (!(vb.width > 0.0) || !(vb.height > 0.0)) return std::nullopt;
  return vb;
}

namespace {

bool is_name_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return is_name_start(c) || std::isdigit(u) || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Recursive-descent reader for the XML subset SVG files use: prolog,
// comments, processing instructions, DOCTYPE, CDATA, elements, attributes
// and the predefined plus numeric character entities.
class XmlReader {
 public:
  explicit XmlReader(std::string_view src) : src_(src) {}

  SvgElement read_document() {
    skip_misc();
    if (at_end() || src_[pos_] != '<') fail("expected root element");
    SvgElement root = read_element(0);
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  static constexpr int kMaxDepth = 512;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError, what + " at offset " + std::to_string(pos_));
  }

  bool at_end() const { return pos_ >= src_.size(); }
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  void skip_ws() {
    while (!at_end() && detail::is_space(src_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  void skip_doctype() {
    pos_ += 9;  // "<!DOCTYPE"
    int bracket = 0;
    while (!at_end()) {
      char c = src_[pos_++];
      if (c == '[') ++bracket;
      else if (c == ']') --bracket;
      else if (c == '>' && bracket <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  // Whitespace, comments, PIs and DOCTYPE outside the root element.
  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  std::string read_name() {
    if (at_end() || !is_name_start(src_[pos_])) fail("expected name");
    std::size_t start = pos_;
    while (!at_end() && is_name_char(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  // Decodes entity references in [begin, end) of the source.
  std::string decode(std::size_t begin, std::size_t end) {
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      char c = src_[i];
      if (c != '&') {
        out.push_back(c);
        continue;
      }
      auto semi = src_.find(';', i);
      if (semi == std::string_view::npos || semi >= end) {
        pos_ = i;
        fail("unterminated entity reference");
      }
      std::string_view ent = src_.substr(i + 1, semi - i - 1);
      if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "amp") out.push_back('&');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (ent.size() > 1 && ent[0] == '#') {
        std::uint32_t cp = 0;
        bool hex = ent[1] == 'x' || ent[1] == 'X';
        std::string_view digits = ent.substr(hex ? 2 : 1);
        if (digits.empty()) {
          pos_ = i;
          fail("empty character reference");
        }
        for (char d : digits) {
          int v;
          if (d >= '0' && d <= '9') v = d - '0';
          else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
          else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
          else {
            pos_ = i;
            fail("bad character reference");
          }
          cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
          if (cp > 0x10FFFF) {
            pos_ = i;
            fail("character reference out of range");
          }
        }
        append_utf8(out, cp);
      } else {
        pos_ = i;
        fail("unknown entity '" + std::string(ent) + "'");
      }
      i = semi;
    }
    return out;
  }

  void read_attributes(SvgElement& el) {
    while (true) {
      std::size_t before = pos_;
      skip_ws();
      if (at_end()) fail("unterminated start tag");
      char c = src_[pos_];
      if (c == '>' || c == '/') return;
      if (pos_ == before) fail("expected whitespace before attribute");
      std::string name = read_name();
      skip_ws();
      if (at_end() || src_[pos_] != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      if (at_end() || (src_[pos_] != '"' && src_[pos_] != '\'')) fail("expected quoted attribute value");
      char quote = src_[pos_++];
      std::size_t start = pos_;
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      auto lt = src_.find('<', start);
      if (lt != std::string_view::npos && lt < end) {
        pos_ = lt;
        fail("'<' in attribute value");
      }
      std::string value = decode(start, end);
      pos_ = end + 1;
      if (el.attribute(name) != nullptr) fail("duplicate attribute '" + name + "'");
      el.attributes.emplace_back(std::move(name), std::move(value));
    }
  }

  SvgElement read_element(int depth) {
    if (depth > kMaxDepth) fail("element nesting too deep");
    ++pos_;  // '<'
    SvgElement el;
    el.qualified_name = read_name();
    el.tag = std::string(local_name(el.qualified_name));
    read_attributes(el);
    if (starts_with("/>")) {
      pos_ += 2;
      return el;
    }
    if (at_end() || src_[pos_] != '>') fail("malformed start tag");
    ++pos_;
    read_content(el, depth);
    return el;
  }

  void read_content(SvgElement& el, int depth) {
    while (true) {
      if (at_end()) fail("unclosed element <" + el.qualified_name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        std::string name = read_name();
        if (name != el.qualified_name) {
          fail("mismatched closing tag </" + name + "> for <" + el.qualified_name + ">");
        }
        skip_ws();
        if (at_end() || src_[pos_] != '>') fail("malformed end tag");
        ++pos_;
        return;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        std::size_t start = pos_ + 9;
        skip_until("]]>", "CDATA section");
        el.text.append(src_.substr(start, pos_ - 3 - start));
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (src_[pos_] == '<') {
        el.children.push_back(read_element(depth + 1));
      } else {
        std::size_t start = pos_;
        auto next = src_.find('<', pos_);
        std::size_t end = next == std::string_view::npos ? src_.size() : next;
        el.text += decode(start, end);
        pos_ = end;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

SvgDocument parse_svg(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kParseError, "empty input");
  SvgDocument doc;
  doc.root = XmlReader(text).read_document();
  if (doc.root.tag != "svg") {
    throw Error(ErrorCode::kNonSvgRoot, "root element is <" + doc.root.qualified_name + ">");
  }
  if (const auto* vb = doc.root.attribute("viewBox")) {
    doc.view_box = parse_view_box(*vb);
    if (!doc.view_box) throw Error(ErrorCode::kParseError, "invalid viewBox '" + *vb + "'");
  }
  doc.source_text = std::string(text);
  return doc;
}

}  // namespace svgr

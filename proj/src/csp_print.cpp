#include <sstream>

#include "collabc/csp.hpp"

namespace collabc::csp {

namespace {

const char* op_token(ProcKind k) {
  switch (k) {
    case ProcKind::Par: return "||";
    case ProcKind::ExtChoice: return "[]";
    case ProcKind::EventChoice: return "[*]";
    default: return "?";
  }
}

// `->` binds tighter than `;`, which binds tighter than the choice/parallel
// operators. Choice nodes print as self-parenthesized units; a Seq appearing
// as a left operand of `;`, a choice branch, or a prefix continuation keeps
// its parentheses so grouping survives a re-parse.
void print(std::ostringstream& out, const ProcessRef& p) {
  switch (p->kind) {
    case ProcKind::Skip:
      out << "Skip";
      break;
    case ProcKind::Event:
    case ProcKind::Send:
    case ProcKind::Recv: {
      if (p->kind == ProcKind::Event)
        out << p->name;
      else
        out << p->name << (p->kind == ProcKind::Send ? "!" : "?") << p->message;
      out << " -> ";
      const ProcessRef& cont = p->children[0];
      if (cont->kind == ProcKind::Seq) {
        out << "(";
        print(out, cont);
        out << ")";
      } else {
        print(out, cont);
      }
      break;
    }
    case ProcKind::Seq: {
      const ProcessRef& l = p->children[0];
      const ProcessRef& r = p->children[1];
      if (l->kind == ProcKind::Seq) {
        out << "(";
        print(out, l);
        out << ")";
      } else {
        print(out, l);
      }
      out << "; ";
      print(out, r);
      break;
    }
    case ProcKind::Par:
    case ProcKind::ExtChoice:
    case ProcKind::EventChoice: {
      out << "(";
      for (std::size_t i = 0; i < p->children.size(); ++i) {
        if (i) out << " " << op_token(p->kind) << " ";
        const ProcessRef& b = p->children[i];
        if (b->kind == ProcKind::Seq) {
          out << "(";
          print(out, b);
          out << ")";
        } else {
          print(out, b);
        }
      }
      out << ")";
      break;
    }
    case ProcKind::Call:
      out << p->name << "()";
      break;
  }
}

}  // namespace

std::string print_process(const ProcessRef& p) {
  std::ostringstream out;
  print(out, p);
  return out.str();
}

std::string print_csp(const CspSpec& spec) {
  std::ostringstream out;
  for (const ChannelDecl& c : spec.channels)
    out << "channel " << c.name << " " << c.capacity << ";\n";
  for (const ProcessDef& d : spec.defs) {
    out << d.name << "() = ";
    print(out, d.body);
    out << ";\n";
  }
  if (spec.explicit_system) {
    out << "System() = ";
    for (std::size_t i = 0; i < spec.system.size(); ++i) {
      if (i) out << " || ";
      out << spec.system[i] << "()";
    }
    out << ";\n";
  }
  return out.str();
}

}  // namespace collabc::csp

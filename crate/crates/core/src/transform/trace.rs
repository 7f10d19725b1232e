//! Plain-text dump of a representation, one line per level:
//!
//! ```text
//! level 1: X=[ab ab ab] C=[1 2 2] T=[s* s* 1]
//! level 0: X=[a b a b] C=[a a b a] T=[a b a b]
//! L: a b a b 1
//! ```
//!
//! `s*` is a forced `s`, repeats print as their index, level-0 contexts print
//! as the context symbol. Bytes outside printable ASCII (and `[`, `]`, `\`)
//! print as `\xHH`. The `L` line lists the coded tokens in coding order.

use std::fmt::{self, Write};

use super::{MultilevelRepresentation, Token};

pub(crate) fn write_byte(out: &mut impl Write, b: u8) -> fmt::Result {
    if b.is_ascii_graphic() && !matches!(b, b'[' | b']' | b'\\') {
        out.write_char(b as char)
    } else {
        write!(out, "\\x{b:02x}")
    }
}

fn write_token(out: &mut impl Write, token: Token) -> fmt::Result {
    match token {
        Token::S { forced: true } => out.write_str("s*"),
        Token::S { forced: false } => out.write_str("s"),
        Token::Repeat(m) => write!(out, "{m}"),
        Token::Symbol(b) => write_byte(out, b),
    }
}

fn write_list<T>(
    out: &mut String,
    items: impl IntoIterator<Item = T>,
    mut each: impl FnMut(&mut String, T) -> fmt::Result,
) -> fmt::Result {
    out.push('[');
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        each(out, item)?;
    }
    out.push(']');
    Ok(())
}

pub fn render_trace(rep: &MultilevelRepresentation) -> String {
    let mut out = String::new();
    render(rep, &mut out).expect("writing to a String cannot fail");
    out
}

fn render(rep: &MultilevelRepresentation, out: &mut String) -> fmt::Result {
    for seq in rep.levels() {
        write!(out, "level {}: X=", seq.level)?;
        write_list(out, 0..seq.len(), |o, j| {
            rep.block(seq.level, j).iter().try_for_each(|&b| write_byte(o, b))
        })?;
        out.push_str(" C=");
        write_list(out, &seq.labels, |o, &label| {
            if seq.level == 0 {
                write_byte(o, label as u8)
            } else {
                write!(o, "{label}")
            }
        })?;
        out.push_str(" T=");
        write_list(out, &seq.tokens, |o, &t| write_token(o, t))?;
        out.push('\n');
    }
    out.push_str("L:");
    for entry in rep.flatten().coded() {
        out.push(' ');
        write_token(out, entry.token)?;
    }
    out.push('\n');
    Ok(())
}

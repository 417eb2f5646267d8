use super::{Formula, Variable};

pub(super) fn render<V: Variable>(f: &Formula<V>) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula<V: Variable>(f: &Formula<V>, out: &mut String) {
    match f {
        Formula::Mem(x, y) => out.push_str(&format!("{x} in {y}")),
        Formula::Eq(x, y) => out.push_str(&format!("{x} = {y}")),
        Formula::Not(g) => {
            out.push('~');
            if matches!(**g, Formula::Not(_)) {
                write_formula(g, out);
            } else {
                out.push('(');
                write_formula(g, out);
                out.push(')');
            }
        }
        Formula::And(a, b) => write_binary(a, " & ", b, out),
        Formula::Or(a, b) => write_binary(a, " | ", b, out),
        Formula::Implies(a, b) => write_binary(a, " -> ", b, out),
        Formula::Iff(a, b) => write_binary(a, " <-> ", b, out),
        Formula::Forall(x, g) => {
            out.push_str(&format!("forall {x} . "));
            write_formula(g, out);
        }
        Formula::Exists(x, g) => {
            out.push_str(&format!("exists {x} . "));
            write_formula(g, out);
        }
    }
}

fn write_binary<V: Variable>(a: &Formula<V>, op: &str, b: &Formula<V>, out: &mut String) {
    write_operand(a, out);
    out.push_str(op);
    write_operand(b, out);
}

// Atoms and negations are self-delimiting; everything else is parenthesized.
fn write_operand<V: Variable>(f: &Formula<V>, out: &mut String) {
    if f.is_atom() || matches!(f, Formula::Not(_)) {
        write_formula(f, out);
    } else {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    }
}

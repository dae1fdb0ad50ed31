//! Scalar field expressions in `x` and `y`.

use std::sync::Arc;

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, Function,
    HashMapContext, Node, Value,
};
use sqrtlap::geometry::{Domain, Field};

pub struct Expr {
    source: String,
    tree: Node,
    context: HashMapContext,
}

type Unary = fn(f64) -> f64;

fn unary(f: Unary) -> Function {
    Function::new(move |arg| Ok(Value::Float(f(arg.as_number()?))))
}

impl Expr {
    /// Parses `source`. Besides the `math::*` builtins, `sin`, `cos`, `tan`,
    /// `exp`, `ln`, `sqrt`, `abs` and the constant `pi` are available.
    pub fn parse(source: &str) -> Result<Self, String> {
        let tree =
            build_operator_tree(source).map_err(|e| format!("bad expression `{source}`: {e}"))?;
        let mut context = HashMapContext::new();
        let fns: [(&str, Unary); 7] = [
            ("sin", f64::sin),
            ("cos", f64::cos),
            ("tan", f64::tan),
            ("exp", f64::exp),
            ("ln", f64::ln),
            ("sqrt", f64::sqrt),
            ("abs", f64::abs),
        ];
        for (name, f) in fns {
            context
                .set_function(name.into(), unary(f))
                .map_err(|e| e.to_string())?;
        }
        context
            .set_value("pi".into(), Value::Float(std::f64::consts::PI))
            .map_err(|e| e.to_string())?;
        Ok(Self {
            source: source.to_string(),
            tree,
            context,
        })
    }

    pub fn eval(&mut self, x: f64, y: f64) -> Result<f64, String> {
        for (name, v) in [("x", x), ("y", y)] {
            self.context
                .set_value(name.into(), Value::Float(v))
                .map_err(|e| e.to_string())?;
        }
        self.tree
            .eval_number_with_context(&self.context)
            .map_err(|e| format!("cannot evaluate `{}` at ({x}, {y}): {e}", self.source))
    }

    /// Samples the expression at every active node.
    pub fn sample(&mut self, domain: &Arc<Domain<f64>>) -> Result<Field<f64>, String> {
        let values = (0..domain.len())
            .map(|i| {
                let [x, y] = domain.point(i);
                self.eval(x, y)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Field::new(domain.clone(), values).map_err(|e| format!("expression `{}`: {e}", self.source))
    }
}

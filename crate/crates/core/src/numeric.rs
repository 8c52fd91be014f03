//! Tolerances and small floating-point helpers shared across modules.

/// Atoms whose points are closer than this are merged.
pub const POINT_MERGE_TOL: f64 = 1e-12;

/// Constructors renormalize probabilities whose sum is within this of one.
pub const PROB_RENORMALIZE_TOL: f64 = 1e-9;

/// Probability levels within this distance of a breakpoint are treated as
/// hitting it. Tail sums of mixtures only reproduce constructed levels up to
/// a few ulps.
pub const LEVEL_SNAP: f64 = 1e-12;

/// Absolute tolerance on values and slopes in structural matching.
pub const STRUCT_TOL: f64 = 1e-10;

/// Relative tolerance on the equality of means in the concave order.
pub const MEAN_TOL: f64 = 1e-9;

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Formats `x` with 17 significant digits, `%.17g` style, so the printed
/// decimal parses back to the same `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let mut s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.push('0');
            }
        } else {
            s.push_str(".0");
        }
        s
    } else {
        let mut m = mantissa.to_string();
        if m.contains('.') {
            while m.ends_with('0') {
                m.pop();
            }
            if m.ends_with('.') {
                m.pop();
            }
        }
        format!("{m}e{exp}")
    }
}

/// A `serde_json` formatter that writes floats through [`fmt17`].
#[derive(Clone, Debug, Default)]
pub struct Digits17Formatter {
    pretty: Option<serde_json::ser::PrettyFormatter<'static>>,
}

impl Digits17Formatter {
    pub fn compact() -> Self {
        Self { pretty: None }
    }

    pub fn pretty() -> Self {
        Self {
            pretty: Some(serde_json::ser::PrettyFormatter::new()),
        }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident : $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + std::io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
                match &mut self.pretty {
                    Some(p) => serde_json::ser::Formatter::$name(p, writer $(, $arg)*),
                    None => serde_json::ser::Formatter::$name(&mut serde_json::ser::CompactFormatter, writer $(, $arg)*),
                }
            }
        )*
    };
}

impl serde_json::ser::Formatter for Digits17Formatter {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serializes `value` to JSON with 17-significant-digit floats.
pub fn to_json_17<T: serde::Serialize>(value: &T, pretty: bool) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let fmt = if pretty {
        Digits17Formatter::pretty()
    } else {
        Digits17Formatter::compact()
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

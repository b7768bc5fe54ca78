use std::fmt::Write as _;

/// Line-oriented carve log. The text is canonical: both execution modes
/// emit it byte for byte identically.
///
/// ```text
/// carve v1
/// variant <id|balanced|rg|rg-balanced>
/// params n=<n> b=<b> L=<L> phases=<P> steps=<T> accept=<A> kill=<K>
/// s <node> <cluster-id>                      one per node of S, ascending
/// g <u> <v>                                  edges of G[S], u < v
/// phase <i>
/// pc <cluster> <level> <tokens> <mark> <phi> live clusters at phase start
/// step <i> <j>                               only steps with events
/// p <node> <from> <to> <contact>
/// a <cluster> <p> <tokens>
/// k <cluster> <p> <cost> <tokens>            p = 0 is a stall
/// d <cluster>
/// lv <cluster> <level> <branch>
/// fin <cluster>
/// end
/// out <node> <cluster>
/// tree <cluster> <node> <parent|-> <terminal 0|1>
/// stat kills=<k> survivors=<s> tokens_created=<t> max_changes=<c>
/// ```
///
/// Clusters are named by their seed node's index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CarveTrace {
    text: String,
}

impl CarveTrace {
    pub(crate) fn line(&mut self, args: std::fmt::Arguments<'_>) {
        let _ = self.text.write_fmt(args);
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }

    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.text.lines()
    }

    /// The last `k` lines, for error reports.
    pub fn tail(&self, k: usize) -> String {
        let lines: Vec<&str> = self.text.lines().collect();
        lines[lines.len().saturating_sub(k)..].join("\n")
    }
}

macro_rules! record {
    ($trace:expr, $($arg:tt)*) => {
        $trace.line(format_args!($($arg)*))
    };
}
pub(crate) use record;

use super::{Dir, ModelError, Protocol, ProtocolBuilder};

/// Parses the line-oriented protocol format.
///
/// ```text
/// protocol <name>
/// node <id>
/// channel <id> from <node> to <node>
/// alphabet <channel> <sym> ...
/// machine <node> start <state>
/// trans <node> <state> (+|-)<sym>@<channel> <state>
/// ```
///
/// `#` starts a comment that runs to the end of the line.
pub fn parse_protocol(text: &str) -> Result<Protocol, ModelError> {
    let mut b = ProtocolBuilder::new("");
    let mut named = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        b.set_line(line);
        let err = |msg: String| ModelError::Parse { line, msg };
        let at = |e: ModelError| match e {
            ModelError::Parse { .. } => e,
            other => ModelError::Parse {
                line,
                msg: other.to_string(),
            },
        };
        match words[0] {
            "protocol" => {
                if words.len() != 2 {
                    return Err(err("expected `protocol <name>`".into()));
                }
                if named {
                    return Err(err("duplicate `protocol` line".into()));
                }
                named = true;
                b.set_name(words[1]);
            }
            "node" => {
                if words.len() != 2 {
                    return Err(err("expected `node <id>`".into()));
                }
                b.node(words[1]).map_err(at)?;
            }
            "channel" => {
                if words.len() != 6 || words[2] != "from" || words[4] != "to" {
                    return Err(err("expected `channel <id> from <node> to <node>`".into()));
                }
                b.channel(words[1], words[3], words[5]).map_err(at)?;
            }
            "alphabet" => {
                if words.len() < 2 {
                    return Err(err("expected `alphabet <channel> <sym> ...`".into()));
                }
                b.symbols(words[1], &words[2..]).map_err(at)?;
            }
            "machine" => {
                if words.len() != 4 || words[2] != "start" {
                    return Err(err("expected `machine <node> start <state>`".into()));
                }
                b.start(words[1], words[3]).map_err(at)?;
            }
            "trans" => {
                if words.len() != 5 {
                    return Err(err(
                        "expected `trans <node> <state> (+|-)<sym>@<channel> <state>`".into(),
                    ));
                }
                let act = words[3];
                let dir = match act.chars().next() {
                    Some('-') => Dir::Send,
                    Some('+') => Dir::Recv,
                    _ => return Err(err(format!("action `{act}` must start with + or -"))),
                };
                let (sym, chan) = act[1..]
                    .split_once('@')
                    .ok_or_else(|| err(format!("action `{act}` lacks `@<channel>`")))?;
                if sym.is_empty() || chan.is_empty() {
                    return Err(err(format!("malformed action `{act}`")));
                }
                b.trans(words[1], words[2], dir, sym, chan, words[4]).map_err(at)?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if !named {
        return Err(ModelError::Parse {
            line: 1,
            msg: "missing `protocol <name>` line".into(),
        });
    }
    b.build()
}

//! `.plugin` manifest grammar.
//!
//! ```text
//! # comment
//! module <name>          first non-comment line
//! category <label>       zero or more
//! provides <key>         zero or more
//! requires <key>         zero or more
//! entry <factory-id>     exactly one
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use super::error::ManifestParseError;
use super::registry::{Origin, PluginDescriptor};

/// Parses one manifest. `file` is used for error reporting and as the origin.
pub fn parse_manifest(text: &str, file: &Path) -> Result<PluginDescriptor, ManifestParseError> {
    let err = |line: usize, reason: String| ManifestParseError {
        file: file.to_path_buf(),
        line,
        reason,
    };

    let mut name: Option<String> = None;
    let mut entry: Option<String> = None;
    let mut categories = BTreeSet::new();
    let mut provides = BTreeSet::new();
    let mut requires = BTreeSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let directive = parts.next().unwrap_or_default();
        let value = parts.next();
        if parts.next().is_some() {
            return Err(err(lineno, format!("`{directive}` takes exactly one argument")));
        }
        let Some(value) = value else {
            return Err(err(lineno, format!("`{directive}` is missing its argument")));
        };

        if name.is_none() && directive != "module" {
            return Err(err(lineno, "first directive must be `module`".into()));
        }
        match directive {
            "module" => {
                if name.is_some() {
                    return Err(err(lineno, "`module` given twice".into()));
                }
                name = Some(value.to_string());
            }
            "category" => {
                categories.insert(value.to_string());
            }
            "provides" => {
                if requires.contains(value) {
                    return Err(err(lineno, format!("`{value}` is both provided and required")));
                }
                provides.insert(value.to_string());
            }
            "requires" => {
                if provides.contains(value) {
                    return Err(err(lineno, format!("`{value}` is both provided and required")));
                }
                requires.insert(value.to_string());
            }
            "entry" => {
                if entry.is_some() {
                    return Err(err(lineno, "`entry` given twice".into()));
                }
                entry = Some(value.to_string());
            }
            other => return Err(err(lineno, format!("unknown directive `{other}`"))),
        }
    }

    let Some(name) = name else {
        return Err(err(last_line.max(1), "missing `module` line".into()));
    };
    let Some(entry) = entry else {
        return Err(err(last_line.max(1), "missing `entry` line".into()));
    };

    Ok(PluginDescriptor {
        name,
        categories,
        provides,
        requires,
        entry,
        origin: Origin::Manifest(file.to_path_buf()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PluginDescriptor, ManifestParseError> {
        parse_manifest(text, Path::new("x.plugin"))
    }

    #[test]
    fn full_manifest() {
        let d = parse(
            "# twig browser\nmodule TwigBrowser\ncategory GUI\nprovides browser.twig # inline\n\
             requires session.gui\nentry twig.factory\n",
        )
        .unwrap();
        assert_eq!(d.name, "TwigBrowser");
        assert!(d.categories.contains("GUI"));
        assert!(d.provides.contains("browser.twig"));
        assert!(d.requires.contains("session.gui"));
        assert_eq!(d.entry, "twig.factory");
        assert_eq!(d.origin, Origin::Manifest("x.plugin".into()));
    }

    #[test]
    fn missing_entry_reports_file_and_line() {
        let e = parse("module A\ncategory GUI\n").unwrap_err();
        assert_eq!(e.file, Path::new("x.plugin"));
        assert_eq!(e.line, 2);
        assert!(e.reason.contains("entry"));
    }

    #[test]
    fn module_must_come_first() {
        let e = parse("\n# c\ncategory GUI\nmodule A\nentry e\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unknown_directive() {
        let e = parse("module A\nversion 2\nentry e\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.reason.contains("version"));
    }

    #[test]
    fn provides_and_requires_must_be_disjoint() {
        let e = parse("module A\nprovides c\nrequires c\nentry e\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn duplicate_entry_rejected() {
        assert_eq!(parse("module A\nentry e\nentry f\n").unwrap_err().line, 3);
    }

    #[test]
    fn empty_manifest() {
        assert_eq!(parse("").unwrap_err().line, 1);
    }
}

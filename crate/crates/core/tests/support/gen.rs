//! Random script generators. Each renders a small abstract script in one
//! technology's concrete syntax.

use std::collections::BTreeMap;

use iac_smells::parser::TechnologyId;
use proptest::prelude::*;

#[derive(Debug, Clone)]
pub enum Item {
    Comment(String),
    Variable(String, String),
    Resource {
        kind: String,
        title: String,
        attrs: Vec<(String, String)>,
    },
    Blank,
}

fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,6}"
}

fn text() -> impl Strategy<Value = String> {
    "[a-z0-9][a-z0-9 ./:]{0,20}".prop_map(|s| s.trim_end().to_string())
}

fn item() -> impl Strategy<Value = Item> {
    prop_oneof![
        2 => text().prop_map(Item::Comment),
        2 => (word(), text()).prop_map(|(n, v)| Item::Variable(format!("v_{n}"), v)),
        4 => (word(), word(), prop::collection::btree_map(word(), text(), 0..5)).prop_map(|(k, t, attrs)| {
            Item::Resource {
                kind: format!("t_{k}"),
                title: format!("r_{t}"),
                attrs: attrs.into_iter().map(|(n, v)| (format!("a_{n}"), v)).collect(),
            }
        }),
        1 => Just(Item::Blank),
    ]
}

pub fn items() -> impl Strategy<Value = Vec<Item>> {
    prop::collection::vec(item(), 0..12)
}

pub fn technology() -> impl Strategy<Value = TechnologyId> {
    prop::sample::select(TechnologyId::ALL.to_vec())
}

/// Renders `items` in `tech`. Variables of Ansible scripts go to the play's
/// `vars` section; everything else keeps its order.
pub fn render(tech: TechnologyId, items: &[Item]) -> String {
    let mut out = String::new();
    match tech {
        TechnologyId::Puppet => {
            for item in items {
                match item {
                    Item::Comment(c) => out.push_str(&format!("# {c}\n")),
                    Item::Variable(n, v) => out.push_str(&format!("${n} = '{v}'\n")),
                    Item::Resource { kind, title, attrs } => {
                        out.push_str(&format!("{kind} {{ '{title}':\n"));
                        for (n, v) in attrs {
                            out.push_str(&format!("  {n} => '{v}',\n"));
                        }
                        out.push_str("}\n");
                    }
                    Item::Blank => out.push('\n'),
                }
            }
        }
        TechnologyId::Chef => {
            for item in items {
                match item {
                    Item::Comment(c) => out.push_str(&format!("# {c}\n")),
                    Item::Variable(n, v) => out.push_str(&format!("{n} = '{v}'\n")),
                    Item::Resource { kind, title, attrs } => {
                        out.push_str(&format!("{kind} '{title}' do\n"));
                        for (n, v) in attrs {
                            out.push_str(&format!("  {n} '{v}'\n"));
                        }
                        out.push_str("end\n");
                    }
                    Item::Blank => out.push('\n'),
                }
            }
        }
        TechnologyId::Ansible => {
            out.push_str("- hosts: all\n");
            let vars: Vec<_> = items
                .iter()
                .filter_map(|i| match i {
                    Item::Variable(n, v) => Some((n, v)),
                    _ => None,
                })
                .collect();
            if !vars.is_empty() {
                out.push_str("  vars:\n");
                let unique: BTreeMap<_, _> = vars.into_iter().collect();
                for (n, v) in unique {
                    out.push_str(&format!("    {n}: '{v}'\n"));
                }
            }
            out.push_str("  tasks:\n");
            for item in items {
                match item {
                    Item::Comment(c) => out.push_str(&format!("    # {c}\n")),
                    Item::Resource { kind, title, attrs } => {
                        out.push_str(&format!("    - name: {title}\n      {kind}:\n"));
                        for (n, v) in attrs {
                            out.push_str(&format!("        {n}: '{v}'\n"));
                        }
                    }
                    Item::Blank => out.push('\n'),
                    Item::Variable(..) => {}
                }
            }
        }
        TechnologyId::Docker => {
            out.push_str("FROM alpine:3.19\n");
            for item in items {
                match item {
                    Item::Comment(c) => out.push_str(&format!("# {c}\n")),
                    Item::Variable(n, v) => out.push_str(&format!("ENV {}={}\n", n.to_uppercase(), v.replace(' ', "_"))),
                    Item::Resource { kind, attrs, .. } => {
                        let args: Vec<String> = attrs.iter().map(|(_, v)| v.replace(' ', "_")).collect();
                        out.push_str(&format!("RUN {kind} {}\n", args.join(" ")).replace(" \n", "\n"));
                    }
                    Item::Blank => out.push('\n'),
                }
            }
        }
        TechnologyId::Terraform => {
            for item in items {
                match item {
                    Item::Comment(c) => out.push_str(&format!("# {c}\n")),
                    Item::Variable(n, v) => out.push_str(&format!("variable \"{n}\" {{\n  default = \"{v}\"\n}}\n")),
                    Item::Resource { kind, title, attrs } => {
                        out.push_str(&format!("resource \"{kind}\" \"{title}\" {{\n"));
                        for (n, v) in attrs {
                            out.push_str(&format!("  {n} = \"{v}\"\n"));
                        }
                        out.push_str("}\n");
                    }
                    Item::Blank => out.push('\n'),
                }
            }
        }
    }
    out
}

/// A random script in a random technology.
pub fn script() -> impl Strategy<Value = (TechnologyId, String)> {
    (technology(), items()).prop_map(|(tech, items)| {
        let text = render(tech, &items);
        (tech, text)
    })
}

/// Puppet resources drawn from a small pool so that duplicates are common.
pub fn duplicate_prone_resources() -> impl Strategy<Value = Vec<(String, Vec<(String, String)>)>> {
    let attrs = prop::collection::btree_map(
        prop::sample::select(vec!["ensure", "mode", "owner", "group"]),
        prop::sample::select(vec!["present", "root", "0644"]),
        0..4,
    )
    .prop_map(|m| m.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<Vec<_>>());
    prop::collection::vec((prop::sample::select(vec!["file", "user"]), attrs), 0..10)
        .prop_map(|v| v.into_iter().map(|(k, a)| (k.to_string(), a)).collect())
}

/// Puppet text for resources titled `r0`, `r1`, ... in the given order.
pub fn render_resources(resources: &[(String, Vec<(String, String)>)], titles: &[usize]) -> String {
    let mut out = String::new();
    for (res, title) in resources.iter().zip(titles) {
        out.push_str(&format!("{} {{ 'r{title}':\n", res.0));
        for (n, v) in &res.1 {
            out.push_str(&format!("  {n} => '{v}',\n"));
        }
        out.push_str("}\n");
    }
    out
}

/// Puppet attributes and comments built from security-flavored vocabulary.
pub fn security_script() -> impl Strategy<Value = String> {
    let name = prop::sample::select(vec![
        "password", "db_pwd", "api_token", "user", "role", "bind", "url", "checksum", "hash", "command", "owner",
    ]);
    let value = prop::sample::select(vec![
        "", "root", "admin", "0.0.0.0", "::", "http://x.org", "https://x.org", "md5", "sha1", "wget http://x/a",
        "curl -O https://x/a", "sha256 abc", "hunter2", "${var}", "gpg --verify",
    ]);
    let comment = prop::sample::select(vec!["todo later", "fix bug", "all good", "see ticket", "hack around gpg"]);
    let resource = prop::collection::btree_map(name, value, 0..5);
    prop::collection::vec((resource, prop::option::of(comment)), 0..6).prop_map(|res| {
        let mut out = String::new();
        for (i, (attrs, comment)) in res.into_iter().enumerate() {
            if let Some(c) = comment {
                out.push_str(&format!("# {c}\n"));
            }
            out.push_str(&format!("exec {{ 'r{i}':\n"));
            for (n, v) in attrs {
                out.push_str(&format!("  {n} => '{v}',\n"));
            }
            out.push_str("}\n");
        }
        out
    })
}

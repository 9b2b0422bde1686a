package org.demo.db;

import java.util.ArrayList;
import java.util.List;

public class TransactionsDbAdapter {
    private static final String TABLE = "transactions";
    private final Database db;

    public TransactionsDbAdapter(Database db) {
        this.db = db;
    }

    public List<String> descriptionsFor(String accountUid) {
        String sql = "SELECT t.description FROM " + TABLE + " t "
                + "JOIN accounts a ON a.uid = ? "
                + "ORDER BY t.timestamp";
        List<String> out = new ArrayList<>();
        for (String row : db.query(sql, accountUid)) {
            out.add(row);
        }
        return out;
    }

    public void insert(String uid, String description, long timestamp) {
        db.execute("INSERT INTO transactions (uid, description, timestamp) VALUES (?, ?, ?)",
                uid, description, timestamp);
    }

    public void rename(String uid, String description) {
        db.execute("UPDATE transactions SET description = ? WHERE uid = ?", description, uid);
    }

    public void purge(String transactionUid) {
        db.execute("DELETE FROM splits WHERE transaction_uid = ?", transactionUid);
    }

    interface Database {
        List<String> query(String sql, String... args);

        void execute(String sql, Object... args);
    }
}

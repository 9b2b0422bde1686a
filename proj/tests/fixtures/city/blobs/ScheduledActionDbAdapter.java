package org.demo.db;

public class ScheduledActionDbAdapter {
    private final TransactionsDbAdapter.Database db;

    public ScheduledActionDbAdapter(TransactionsDbAdapter.Database db) {
        this.db = db;
    }

    public void schedule(String actionUid, int period) {
        db.execute("INSERT INTO scheduled_actions (action_uid, period) VALUES (?, ?)", actionUid, period);
    }
}
